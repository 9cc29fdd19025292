#include "chenverify/runner.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <string>

namespace {

int emit(const chenverify::RunResult& result, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << result.rendered;
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "cannot write '" << out_path << "'\n";
            return 2;
        }
        out << result.rendered;
    }
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical verification harness for curvature inequalities "
                 "on statistical submanifolds"};
    app.require_subcommand(1);

    chenverify::RunConfig cfg;
    cfg.seed = chenverify::env_default_seed();
    std::string out_path;
    std::string spec_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", cfg.seed, "RNG seed (64-bit)");
        cmd->add_option("--samples", cfg.samples, "sample point count");
        cmd->add_option("--tol", cfg.tol, "inequality tolerance");
        cmd->add_option("--format", cfg.format, "json|csv|text")
            ->check(CLI::IsMember({"json", "csv", "text"}));
        cmd->add_option("--out", out_path, "write the report to a file");
    };

    CLI::App* validate =
        app.add_subcommand("validate", "run the structure validators");
    validate->add_option("spec", spec_path, "manifold spec file")->required();
    add_common(validate);

    CLI::App* chen = app.add_subcommand(
        "chen", "verify the first inequality over sampled points and planes");
    chen->add_option("spec", spec_path, "manifold spec file")->required();
    add_common(chen);
    chen->add_option("--points", cfg.samples, "sample point count");
    chen->add_option("--planes", cfg.planes, "plane draws per point");
    chen->add_option("--case", cfg.case_selector,
                     "theorem case: real|holomorphic")
        ->check(CLI::IsMember({"real", "holomorphic"}));
    chen->add_flag("--delta22", cfg.delta22,
                   "run the delta(2,2) inequality instead");

    CLI::App* delta22 = app.add_subcommand(
        "delta22", "verify the delta(2,2) inequality (two-plane variant)");
    delta22->add_option("spec", spec_path, "manifold spec file")->required();
    add_common(delta22);
    delta22->add_option("--points", cfg.samples, "sample point count");
    delta22->add_option("--planes", cfg.planes, "plane-pair draws per point");
    delta22->add_option("--case", cfg.case_selector,
                        "theorem case: real|holomorphic")
        ->check(CLI::IsMember({"real", "holomorphic"}));

    CLI::App* lemmas =
        app.add_subcommand("lemmas", "run the algebraic lemma property suite");
    add_common(lemmas);
    std::string n_range = "3,8";
    std::string constant = "corrected";
    lemmas->add_option("--n-range", n_range, "tuple sizes, e.g. 3,8");
    lemmas->add_option("--trials", cfg.trials, "random tuples per size");
    lemmas->add_option("--restarts", cfg.restarts, "maximizer restarts");
    lemmas->add_option("--constant", constant,
                       "first-lemma constant: corrected|printed")
        ->check(CLI::IsMember({"corrected", "printed"}));

    CLI::App* generate =
        app.add_subcommand("generate", "emit a spec file for a built-in "
                                       "instance family");
    std::string family;
    std::vector<std::string> kv;
    generate->add_option("family", family,
                         "flat_quaternionic|sphere|skewed_graph|"
                         "normal_family|hessian")
        ->required();
    generate->add_option("--param,-p", kv,
                         "family parameter key=value (repeatable): m, n, "
                         "radius, alpha, dim, potential, submanifold");
    add_common(generate);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate))
            return emit(chenverify::run_validate(spec_path, cfg), out_path);
        if (app.got_subcommand(chen))
            return emit(chenverify::run_chen(spec_path, cfg), out_path);
        if (app.got_subcommand(delta22)) {
            cfg.delta22 = true;
            return emit(chenverify::run_chen(spec_path, cfg), out_path);
        }
        if (app.got_subcommand(lemmas)) {
            size_t comma = n_range.find(',');
            if (comma == std::string::npos) {
                cfg.n_lo = cfg.n_hi = std::stoi(n_range);
            } else {
                cfg.n_lo = std::stoi(n_range.substr(0, comma));
                cfg.n_hi = std::stoi(n_range.substr(comma + 1));
            }
            cfg.lemma_constant = constant == "printed"
                                     ? chenverify::LemmaConstant::Printed
                                     : chenverify::LemmaConstant::Corrected;
            return emit(chenverify::run_lemmas(cfg), out_path);
        }
        if (app.got_subcommand(generate)) {
            std::map<std::string, std::string> params;
            for (const std::string& entry : kv) {
                size_t eq = entry.find('=');
                if (eq == std::string::npos) {
                    std::cerr << "parameter '" << entry
                              << "' is not key=value\n";
                    return 2;
                }
                params[entry.substr(0, eq)] = entry.substr(eq + 1);
            }
            // generate writes the spec to --out and the report to stdout
            return emit(chenverify::run_generate(family, params, out_path,
                                                 cfg),
                        "");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
