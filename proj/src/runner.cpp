#include "chenverify/runner.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace chenverify {

uint64_t env_default_seed() {
    if (const char* env = std::getenv("CHENVERIFY_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 0);
        if (end && *end == '\0') return static_cast<uint64_t>(v);
    }
    return kDefaultSeed;
}

uint64_t fnv1a(const std::string& text) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json vec_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json meta_json(const RunConfig& cfg, const std::string& command,
               const std::string& spec_name, uint64_t spec_hash) {
    Json m;
    m["seed"] = cfg.seed;
    m["version"] = kVersion;
    m["spec_hash"] = spec_hash;
    m["command"] = command;
    if (!spec_name.empty()) m["spec"] = spec_name;
    return m;
}

Json check_json(const CheckResult& c) {
    Json j;
    j["name"] = c.name;
    j["max_residual"] = c.max_residual;
    j["tolerance"] = c.tolerance;
    j["passed"] = c.passed;
    return j;
}

std::string render_text(const Json& report) {
    std::ostringstream os;
    os << "chenverify " << report["meta"]["command"].get<std::string>()
       << " (seed " << report["meta"]["seed"].get<uint64_t>() << ")\n";
    if (report.contains("error"))
        os << "  error: " << report["error"].get<std::string>() << "\n";
    for (const Json& c : report["checks"]) {
        os << "  ";
        if (c.contains("name")) os << c["name"].get<std::string>();
        if (c.contains("passed"))
            os << ": " << (c["passed"].get<bool>() ? "pass" : "FAIL");
        if (c.contains("max_residual"))
            os << " (residual " << c["max_residual"].dump() << ")";
        if (c.contains("margin"))
            os << " margin " << c["margin"].dump()
               << (c.contains("holds") && c["holds"].get<bool>() ? " holds"
                                                                 : " VIOLATED");
        os << "\n";
    }
    os << "findings: " << report["findings"].size() << "\n";
    return os.str();
}

std::string render_csv(const Json& report) {
    std::ostringstream os;
    bool chen = false;
    for (const Json& c : report["checks"])
        if (c.contains("margin")) chen = true;
    if (chen) {
        os << "sample,point,margin,holds\n";
        for (const Json& c : report["checks"]) {
            if (!c.contains("margin")) continue;
            os << c["sample"].dump() << ",\"";
            bool first = true;
            for (const Json& x : c["point"]) {
                if (!first) os << ";";
                first = false;
                os << x.dump();
            }
            os << "\"," << c["margin"].dump() << ","
               << (c["holds"].get<bool>() ? 1 : 0) << "\n";
        }
    } else {
        os << "name,max_residual,passed\n";
        for (const Json& c : report["checks"]) {
            if (!c.contains("name")) continue;
            os << c["name"].get<std::string>() << ","
               << (c.contains("max_residual") ? c["max_residual"].dump() : "")
               << ","
               << (c.contains("passed") ? (c["passed"].get<bool>() ? "1" : "0")
                                        : "")
               << "\n";
        }
    }
    return os.str();
}

RunResult finish(RunResult r, const RunConfig& cfg) {
    if (cfg.format == "csv")
        r.rendered = render_csv(r.report);
    else if (cfg.format == "text")
        r.rendered = render_text(r.report);
    else
        r.rendered = r.report.dump(2) + "\n";
    return r;
}

RunResult input_error(const RunConfig& cfg, const std::string& command,
                      const std::string& message) {
    RunResult r;
    r.exit_code = 2;
    r.report["meta"] = meta_json(cfg, command, "", 0);
    r.report["error"] = message;
    r.report["checks"] = Json::array();
    r.report["findings"] = Json::array();
    return finish(std::move(r), cfg);
}

struct LoadedSpec {
    ManifoldSpec spec;
    std::string text;
    std::string name;
};

LoadedSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open spec file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    LoadedSpec out;
    out.text = buf.str();
    out.name = path;
    size_t slash = path.find_last_of('/');
    std::string stem =
        slash == std::string::npos ? path : path.substr(slash + 1);
    out.spec = parse_spec_text(out.text, stem);
    return out;
}

constexpr double kValidatorTol = 1e-9;
constexpr double kConstantTypeTol = 1e-8;

struct AmbientGate {
    bool passed = true;
    double c = 0;
    bool c_known = false;
    Json checks = Json::array();
};

AmbientGate gate_ambient(const AmbientModel& ambient, int samples,
                         uint64_t seed) {
    AmbientGate gate;
    auto pts = sample_points(ambient.domain, samples, seed);
    ValidationReport rs = validate_statistical(ambient, pts, kValidatorTol);
    for (const CheckResult& c : rs.checks) gate.checks.push_back(check_json(c));
    for (const std::string& f : rs.failures) {
        Json j;
        j["name"] = "evaluation_failure";
        j["detail"] = f;
        j["passed"] = false;
        gate.checks.push_back(j);
        gate.passed = false;
    }
    gate.passed = gate.passed && rs.all_passed();
    if (ambient.has_J) {
        ValidationReport rq =
            validate_quaternionic(ambient, pts, kValidatorTol);
        for (const CheckResult& c : rq.checks)
            gate.checks.push_back(check_json(c));
        gate.passed = gate.passed && rq.all_passed();
        if (gate.passed) {
            ConstantTypeResult ct =
                check_constant_type_curvature(ambient, pts, kConstantTypeTol,
                                              seed);
            Json j;
            j["name"] = "constant_type_curvature";
            j["c_fit"] = ct.c_fit;
            j["max_residual"] = ct.residual;
            j["tolerance"] = kConstantTypeTol;
            j["degenerate"] = ct.degenerate;
            if (ambient.c) {
                j["c_declared"] = *ambient.c;
                j["declared_residual"] = *ct.declared_residual;
                gate.c = *ambient.c;
                gate.c_known = *ct.declared_residual <= kConstantTypeTol;
                j["passed"] = gate.c_known;
            } else {
                gate.c = ct.degenerate ? 0.0 : ct.c_fit;
                gate.c_known = ct.residual <= kConstantTypeTol;
                j["passed"] = gate.c_known;
            }
            gate.passed = gate.passed && gate.c_known;
            gate.checks.push_back(j);
        }
    }
    return gate;
}

}  // namespace

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

RunResult run_validate(const std::string& spec_path, const RunConfig& cfg) {
    LoadedSpec loaded;
    try {
        loaded = load_spec(spec_path);
    } catch (const std::exception& e) {
        return input_error(cfg, "validate", e.what());
    }
    RunResult r;
    r.report["meta"] =
        meta_json(cfg, "validate", loaded.name, fnv1a(loaded.text));
    AmbientGate gate = gate_ambient(loaded.spec.ambient,
                                    std::max(cfg.samples, 1), cfg.seed);
    Json checks = gate.checks;
    bool passed = gate.passed;

    if (loaded.spec.submanifold) {
        try {
            ImmersedSubmanifold sub = ImmersedSubmanifold::create(
                loaded.spec.ambient, *loaded.spec.submanifold);
            auto pts =
                sample_points(sub.domain, std::max(cfg.samples, 1), cfg.seed);
            double worst = 0;
            bool rank_ok = true;
            for (const Eigen::VectorXd& u : pts) {
                try {
                    InducedData data = induced_data(sub, u);
                    (void)data;
                } catch (const std::exception&) {
                    rank_ok = false;
                }
            }
            Json j;
            j["name"] = "submanifold_rank";
            j["max_residual"] = worst;
            j["tolerance"] = 1e-8;
            j["passed"] = rank_ok;
            checks.push_back(j);
            passed = passed && rank_ok;
            if (rank_ok && sub.ambient.has_J) {
                SubClass cls = classify(sub, pts, 1e-6);
                Json cj;
                cj["name"] = "classification";
                cj["label"] = to_string(cls);
                cj["passed"] = true;
                checks.push_back(cj);
            }
        } catch (const std::exception& e) {
            Json j;
            j["name"] = "submanifold";
            j["detail"] = e.what();
            j["passed"] = false;
            checks.push_back(j);
            passed = false;
        }
    }
    r.report["checks"] = checks;
    r.report["findings"] = Json::array();
    r.exit_code = passed ? 0 : 1;
    return finish(std::move(r), cfg);
}

// ---------------------------------------------------------------------------
// chen / delta22
// ---------------------------------------------------------------------------

namespace {

Plane draw_plane(int n, std::mt19937_64& gen) {
    std::normal_distribution<double> nd(0.0, 1.0);
    for (;;) {
        std::vector<VecX<double>> cands;
        for (int t = 0; t < 2; ++t) {
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i) v[i] = nd(gen);
            cands.push_back(v);
        }
        auto out = gram_schmidt_generic<double>(
            Eigen::MatrixXd::Identity(n, n), cands, /*skip_dependent=*/true);
        if (out.size() == 2) return Plane{out[0], out[1]};
    }
}

std::pair<Plane, Plane> draw_plane_pair(int n, std::mt19937_64& gen) {
    std::normal_distribution<double> nd(0.0, 1.0);
    for (;;) {
        std::vector<VecX<double>> cands;
        for (int t = 0; t < 4; ++t) {
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i) v[i] = nd(gen);
            cands.push_back(v);
        }
        auto out = gram_schmidt_generic<double>(
            Eigen::MatrixXd::Identity(n, n), cands, /*skip_dependent=*/true);
        if (out.size() == 4)
            return {Plane{out[0], out[1]}, Plane{out[2], out[3]}};
    }
}

Json terms_json(const std::vector<TermEntry>& terms) {
    Json j;
    for (const TermEntry& t : terms) j[t.name] = t.value;
    return j;
}

Json report_json(const InequalityReport& rep) {
    Json j;
    j["kind"] = to_string(rep.kind);
    j["case"] = to_string(rep.theorem_case);
    j["classification"] = to_string(rep.classification);
    j["lhs"] = rep.lhs;
    j["rhs"] = rep.rhs;
    j["margin"] = rep.margin;
    j["holds"] = rep.holds;
    j["lhs_terms"] = terms_json(rep.lhs_terms);
    j["rhs_terms"] = terms_json(rep.rhs_terms);
    j["info_terms"] = terms_json(rep.info_terms);
    j["H_norm2"] = rep.H_norm2;
    j["Hstar_norm2"] = rep.Hstar_norm2;
    Json eq;
    eq["max_residual"] = rep.equality.max_residual;
    eq["equality"] = rep.equality.equality;
    j["equality"] = eq;
    return j;
}

}  // namespace

RunResult run_chen(const std::string& spec_path, const RunConfig& cfg) {
    const char* command = cfg.delta22 ? "delta22" : "chen";
    LoadedSpec loaded;
    try {
        loaded = load_spec(spec_path);
    } catch (const std::exception& e) {
        return input_error(cfg, command, e.what());
    }
    if (!loaded.spec.submanifold)
        return input_error(cfg, command,
                           "spec file has no [submanifold] section");

    RunResult r;
    r.report["meta"] =
        meta_json(cfg, command, loaded.name, fnv1a(loaded.text));
    Json checks = Json::array();
    Json findings = Json::array();

    if (!loaded.spec.ambient.has_J) {
        r.report["error"] =
            "inequality verification requires a quaternionic ambient";
        r.report["checks"] = checks;
        r.report["findings"] = findings;
        r.exit_code = 1;
        return finish(std::move(r), cfg);
    }

    AmbientGate gate =
        gate_ambient(loaded.spec.ambient, std::max(cfg.samples, 1), cfg.seed);
    for (const Json& c : gate.checks) checks.push_back(c);
    if (!gate.passed) {
        r.report["error"] = "ambient validation failed; inequalities not run";
        r.report["checks"] = checks;
        r.report["findings"] = findings;
        r.exit_code = 1;
        return finish(std::move(r), cfg);
    }

    try {
        ImmersedSubmanifold sub = ImmersedSubmanifold::create(
            loaded.spec.ambient, *loaded.spec.submanifold);
        if (cfg.delta22 && sub.n < 4)
            return input_error(cfg, command,
                               "delta(2,2) requires submanifold dimension "
                               ">= 4");
        if (!cfg.delta22 && sub.n < 3)
            return input_error(
                cfg, command,
                "the first inequality requires submanifold dimension >= 3");

        auto pts = sample_points(sub.domain, cfg.samples, cfg.seed);
        std::vector<InducedData> datas;
        datas.reserve(pts.size());
        for (const Eigen::VectorXd& u : pts)
            datas.push_back(induced_data(sub, u));

        // aggregate classification decides the default case
        double max_tan = 0, max_nor = 0, min_gap = 1e300;
        for (const InducedData& data : datas) {
            max_tan =
                std::max(max_tan, data.alignment.max_tangent_alignment);
            max_nor = std::max(max_nor, data.alignment.max_normal_alignment);
            min_gap = std::min(min_gap, data.alignment.normal_span_gap);
        }
        SubClass cls = SubClass::Generic;
        if (max_nor < 1e-6)
            cls = SubClass::Invariant;
        else if (max_tan < 1e-6)
            cls = min_gap > 1e-6 ? SubClass::LagrangianLike
                                 : SubClass::TotallyReal;
        {
            std::array<double, 3> ta{}, na{};
            for (const InducedData& data : datas)
                for (int a = 0; a < 3; ++a) {
                    ta[size_t(a)] =
                        std::max(ta[size_t(a)],
                                 data.alignment.tangent_alignment[size_t(a)]);
                    na[size_t(a)] =
                        std::max(na[size_t(a)],
                                 data.alignment.normal_alignment[size_t(a)]);
                }
            Json cj;
            cj["name"] = "classification";
            cj["label"] = to_string(cls);
            cj["max_tangent_alignment"] = max_tan;
            cj["max_normal_alignment"] = max_nor;
            cj["tangent_alignment_per_J"] = Json::array({ta[0], ta[1], ta[2]});
            cj["normal_alignment_per_J"] = Json::array({na[0], na[1], na[2]});
            cj["passed"] = cls != SubClass::Generic;
            checks.push_back(cj);
        }

        std::vector<TheoremCase> cases;
        bool want_real = cfg.case_selector == "real" ||
                         (cfg.case_selector.empty() &&
                          (cls == SubClass::TotallyReal ||
                           cls == SubClass::LagrangianLike));
        bool want_hol = cfg.case_selector == "holomorphic" ||
                        (cfg.case_selector.empty() &&
                         cls == SubClass::Invariant);
        if (want_real) cases = {TheoremCase::Real};
        if (want_hol)
            cases = {TheoremCase::HolomorphicPrinted,
                     TheoremCase::HolomorphicProofVariant};
        if (cases.empty()) {
            r.report["error"] =
                std::string("no applicable theorem case: classification is ") +
                to_string(cls);
            r.report["checks"] = checks;
            r.report["findings"] = findings;
            r.exit_code = 1;
            return finish(std::move(r), cfg);
        }

        std::mt19937_64 plane_gen(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
        double min_margin = 1e300;
        int equality_hits = 0, violations = 0, contradictions = 0;
        int sample_idx = 0;
        for (size_t pi = 0; pi < datas.size(); ++pi) {
            const InducedData& data = datas[pi];
            for (int pl = 0; pl < cfg.planes; ++pl) {
                Plane p1, p2;
                if (cfg.delta22) {
                    auto pp = draw_plane_pair(sub.n, plane_gen);
                    p1 = pp.first;
                    p2 = pp.second;
                } else {
                    p1 = draw_plane(sub.n, plane_gen);
                }
                for (TheoremCase tc : cases) {
                    InequalityReport rep =
                        cfg.delta22
                            ? delta22_report(data, p1, p2, tc, gate.c,
                                             cfg.tol)
                            : chen_first_report(data, p1, tc, gate.c,
                                                cfg.tol);
                    Json cj = report_json(rep);
                    cj["sample"] = sample_idx;
                    cj["point"] = vec_json(data.chart_point);
                    cj["plane"] = Json::array({vec_json(p1.x),
                                               vec_json(p1.y)});
                    if (cfg.delta22)
                        cj["plane2"] = Json::array({vec_json(p2.x),
                                                    vec_json(p2.y)});
                    min_margin = std::min(min_margin, rep.margin);
                    if (std::abs(rep.margin) < 1e-8) ++equality_hits;
                    if (!rep.holds) {
                        ++violations;
                        Json f;
                        f["type"] = "inequality_violation";
                        f["case"] = to_string(tc);
                        f["sample"] = sample_idx;
                        f["point"] = vec_json(data.chart_point);
                        f["plane"] = cj["plane"];
                        if (cfg.delta22) f["plane2"] = cj["plane2"];
                        f["lhs"] = rep.lhs;
                        f["rhs"] = rep.rhs;
                        f["margin"] = rep.margin;
                        findings.push_back(f);
                    }
                    if (tc == TheoremCase::Real) {
                        NonminimalityDiagnosis diag =
                            nonminimality_criterion(rep, data);
                        cj["nonminimality"] = to_string(diag);
                        if (diag == NonminimalityDiagnosis::Contradiction) {
                            ++contradictions;
                            Json f;
                            f["type"] = "nonminimality_contradiction";
                            f["sample"] = sample_idx;
                            f["point"] = vec_json(data.chart_point);
                            f["lhs"] = rep.lhs;
                            f["H_norm2"] = data.H_norm2;
                            f["Hstar_norm2"] = data.Hstar_norm2;
                            findings.push_back(f);
                        }
                    }
                    checks.push_back(cj);
                }
                ++sample_idx;
            }
        }
        Json summary;
        summary["name"] = "summary";
        summary["samples"] = sample_idx;
        summary["min_margin"] = min_margin;
        summary["violations"] = violations;
        summary["equality_hits"] = equality_hits;
        summary["contradictions"] = contradictions;
        summary["passed"] = violations == 0 && contradictions == 0;
        checks.push_back(summary);

        r.report["checks"] = checks;
        r.report["findings"] = findings;
        r.exit_code = findings.empty() ? 0 : 3;
        return finish(std::move(r), cfg);
    } catch (const std::invalid_argument& e) {
        r.report["error"] = e.what();
        r.report["checks"] = checks;
        r.report["findings"] = findings;
        r.exit_code = 1;
        return finish(std::move(r), cfg);
    } catch (const std::runtime_error& e) {
        r.report["error"] = e.what();
        r.report["checks"] = checks;
        r.report["findings"] = findings;
        r.exit_code = 1;
        return finish(std::move(r), cfg);
    }
}

// ---------------------------------------------------------------------------
// lemmas
// ---------------------------------------------------------------------------

RunResult run_lemmas(const RunConfig& cfg) {
    RunResult r;
    r.report["meta"] = meta_json(cfg, "lemmas", "", 0);
    Json checks = Json::array();
    Json findings = Json::array();
    if (cfg.trials > 0) {
        for (int n = cfg.n_lo; n <= cfg.n_hi; ++n) {
            if (n >= 3) {
                LemmaScan s = scan_lemma_chen_first(
                    n, cfg.trials, cfg.restarts, cfg.seed + n,
                    cfg.lemma_constant);
                Json j;
                j["name"] = "lemma_chen_first_n" + std::to_string(n);
                j["n"] = n;
                j["trials"] = s.trials;
                j["constant"] =
                    cfg.lemma_constant == LemmaConstant::Corrected
                        ? "corrected"
                        : "printed";
                j["worst_margin"] = s.worst_margin;
                j["max_overshoot"] = s.max_overshoot;
                j["maximizer_pattern_gap"] = s.maximizer_pattern_gap;
                j["maximizer_margin"] = s.maximizer_margin;
                bool sharp_ok =
                    cfg.lemma_constant == LemmaConstant::Corrected
                        ? std::abs(s.maximizer_margin) < 1e-9 &&
                              s.maximizer_pattern_gap < 1e-6
                        : s.maximizer_margin > 0;  // weaker bound: no attain
                if (cfg.lemma_constant == LemmaConstant::Printed)
                    j["sharpness"] = "bound not attained";
                j["passed"] = s.worst_margin >= -1e-12 &&
                              s.max_overshoot <= 1e-9 && sharp_ok;
                checks.push_back(j);
                if (!j["passed"].get<bool>()) {
                    Json f;
                    f["type"] = "lemma_failure";
                    f["name"] = j["name"];
                    findings.push_back(f);
                }
            }
            if (n >= 4) {
                LemmaScan s = scan_lemma_delta22(n, cfg.trials, cfg.restarts,
                                                 cfg.seed + 1000 + n);
                Json j;
                j["name"] = "lemma_delta22_n" + std::to_string(n);
                j["n"] = n;
                j["trials"] = s.trials;
                j["worst_margin"] = s.worst_margin;
                j["max_overshoot"] = s.max_overshoot;
                j["maximizer_pattern_gap"] = s.maximizer_pattern_gap;
                j["maximizer_margin"] = s.maximizer_margin;
                j["passed"] = s.worst_margin >= -1e-12 &&
                              s.max_overshoot <= 1e-9 &&
                              s.maximizer_pattern_gap < 1e-6 &&
                              std::abs(s.maximizer_margin) < 1e-9;
                checks.push_back(j);
                if (!j["passed"].get<bool>()) {
                    Json f;
                    f["type"] = "lemma_failure";
                    f["name"] = j["name"];
                    findings.push_back(f);
                }
            }
        }
    }
    r.report["checks"] = checks;
    r.report["findings"] = findings;
    r.exit_code = findings.empty() ? 0 : 3;
    return finish(std::move(r), cfg);
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

namespace {

double get_param(const std::map<std::string, std::string>& params,
                 const std::string& key, double fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    return std::stod(it->second);
}

std::string get_param_str(const std::map<std::string, std::string>& params,
                          const std::string& key, const std::string& fb) {
    auto it = params.find(key);
    return it == params.end() ? fb : it->second;
}

SubmanifoldSpec torus_submanifold(int n, uint64_t seed) {
    SubmanifoldSpec sub;
    sub.n = n;
    sub.vars = chart_vars("u", n);
    sub.domain = DomainBox::cube(n, -3.0, 3.0);
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> rad(0.7, 1.4);
    sub.immersion.clear();
    std::vector<double> radii;
    for (int k = 0; k < n; ++k) radii.push_back(rad(gen));
    for (int k = 0; k < n; ++k) {
        std::string r = fmt(radii[static_cast<size_t>(k)]);
        std::string uk = "u" + std::to_string(k + 1);
        sub.immersion.push_back(
            ExprAst::parse(r + "*cos(" + uk + ")", sub.vars));
        sub.immersion.push_back(
            ExprAst::parse(r + "*sin(" + uk + ")", sub.vars));
        sub.immersion.push_back(ExprAst::constant(0.0, sub.vars));
        sub.immersion.push_back(ExprAst::constant(0.0, sub.vars));
    }
    return sub;
}

SubmanifoldSpec linear_submanifold(int n) {
    SubmanifoldSpec sub;
    sub.n = n;
    sub.vars = chart_vars("u", n);
    sub.domain = DomainBox::cube(n, -1.0, 1.0);
    for (int k = 0; k < n; ++k) {
        sub.immersion.push_back(
            ExprAst::parse("u" + std::to_string(k + 1), sub.vars));
        for (int pad = 0; pad < 3; ++pad)
            sub.immersion.push_back(ExprAst::constant(0.0, sub.vars));
    }
    return sub;
}

/// Gradient graph: block k carries (u_k, d_k Phi(u), 0, 0); the symmetric
/// second derivatives of the potential keep the J-images normal.
SubmanifoldSpec graph_submanifold(int n, uint64_t seed) {
    SubmanifoldSpec sub;
    sub.n = n;
    sub.vars = chart_vars("u", n);
    sub.domain = DomainBox::cube(n, -1.2, 1.2);
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> amp(0.08, 0.22);
    std::ostringstream phi;
    for (int k = 0; k < n; ++k) {
        if (k) phi << "+";
        phi << fmt(amp(gen)) << "*cos(u" << (k + 1) << ")";
    }
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l)
            phi << "+" << fmt(amp(gen)) << "*cos(u" << (k + 1) << "+u"
                << (l + 1) << ")";
    ExprAst potential = ExprAst::parse(phi.str(), sub.vars);
    for (int k = 0; k < n; ++k) {
        sub.immersion.push_back(
            ExprAst::parse("u" + std::to_string(k + 1), sub.vars));
        sub.immersion.push_back(potential.derivative(k));
        sub.immersion.push_back(ExprAst::constant(0.0, sub.vars));
        sub.immersion.push_back(ExprAst::constant(0.0, sub.vars));
    }
    return sub;
}

void pad_immersion(SubmanifoldSpec& sub, int dim) {
    while (static_cast<int>(sub.immersion.size()) < dim)
        sub.immersion.push_back(ExprAst::constant(0.0, sub.vars));
    if (static_cast<int>(sub.immersion.size()) > dim)
        throw std::invalid_argument(
            "generate: submanifold does not fit the ambient dimension");
}

}  // namespace

ManifoldSpec generate_family(const std::string& family,
                             const std::map<std::string, std::string>& params,
                             uint64_t seed) {
    ManifoldSpec spec;
    if (family == "flat_quaternionic") {
        int m = static_cast<int>(get_param(params, "m", 1));
        spec.ambient = builtin_flat_quaternionic(m);
        std::string sm = get_param_str(params, "submanifold", "none");
        int n = static_cast<int>(get_param(params, "n", m));
        if (sm != "none") {
            if (n < 1 || n > m)
                throw std::invalid_argument(
                    "generate: need 1 <= n <= m for the " + sm + " family");
            SubmanifoldSpec sub;
            if (sm == "torus")
                sub = torus_submanifold(n, seed);
            else if (sm == "linear")
                sub = linear_submanifold(n);
            else if (sm == "graph")
                sub = graph_submanifold(n, seed);
            else
                throw std::invalid_argument("generate: unknown submanifold '" +
                                            sm + "'");
            pad_immersion(sub, spec.ambient.dim);
            spec.submanifold = std::move(sub);
        }
    } else if (family == "sphere") {
        int n = static_cast<int>(get_param(params, "n", 2));
        double radius = get_param(params, "radius", 1.0);
        if (n < 1) throw std::invalid_argument("generate: sphere needs n >= 1");
        if (!(radius > 0))
            throw std::invalid_argument("generate: sphere needs radius > 0");
        spec.ambient = builtin_euclidean(n + 1);
        SubmanifoldSpec sub;
        sub.n = n;
        sub.vars = chart_vars("u", n);
        DomainBox box;
        box.lo = Eigen::VectorXd::Constant(n, 0.5);
        box.hi = Eigen::VectorXd::Constant(n, 2.6);
        box.lo[n - 1] = -2.5;
        box.hi[n - 1] = 2.5;
        sub.domain = box;
        for (int k = 0; k <= n; ++k) {
            std::ostringstream e;
            e << fmt(radius);
            for (int i = 0; i < std::min(k, n); ++i)
                e << "*sin(u" << (i + 1) << ")";
            if (k < n) e << "*cos(u" << (k + 1) << ")";
            sub.immersion.push_back(ExprAst::parse(e.str(), sub.vars));
        }
        spec.submanifold = std::move(sub);
    } else if (family == "skewed_graph") {
        int dim = static_cast<int>(get_param(params, "dim", 4));
        int n = static_cast<int>(get_param(params, "n", 2));
        if (dim < 3 || n < 1 || n > dim - 1)
            throw std::invalid_argument("generate: skewed_graph needs dim >= "
                                        "3 and 1 <= n < dim");
        spec.ambient = builtin_euclidean(dim);
        std::mt19937_64 gen(seed);
        std::uniform_real_distribution<double> amp(0.1, 0.3);
        auto set_K = [&](int a, int b, int c, const std::string& expr) {
            ExprAst e = ExprAst::parse(expr, spec.ambient.vars);
            int perms[6][3] = {{a, b, c}, {a, c, b}, {b, a, c},
                               {b, c, a}, {c, a, b}, {c, b, a}};
            for (auto& p : perms)
                spec.ambient.skewness[static_cast<size_t>(p[0])](p[1], p[2]) =
                    e;
        };
        set_K(0, 0, 1, fmt(amp(gen)) + "*sin(x1)");
        set_K(1, 2 % dim, std::min(3, dim - 1), fmt(amp(gen)) + "*x2");
        set_K(2 % dim, 2 % dim, 2 % dim,
              fmt(amp(gen)) + "*cos(x1+x" + std::to_string(dim) + ")");
        SubmanifoldSpec sub;
        sub.n = n;
        sub.vars = chart_vars("u", n);
        sub.domain = DomainBox::cube(n, -0.9, 0.9);
        for (int k = 0; k < n; ++k)
            sub.immersion.push_back(
                ExprAst::parse("u" + std::to_string(k + 1), sub.vars));
        std::uniform_real_distribution<double> gamp(0.15, 0.35);
        for (int k = n; k < dim; ++k) {
            std::ostringstream e;
            e << fmt(gamp(gen)) << "*sin(u1";
            if (n > 1) e << "+" << fmt(gamp(gen)) << "*u" << std::min(2, n);
            e << ")";
            if (n > 1 && k % 2 == 0)
                e << "+" << fmt(0.5 * gamp(gen)) << "*u1*u" << std::min(2, n);
            sub.immersion.push_back(ExprAst::parse(e.str(), sub.vars));
        }
        spec.submanifold = std::move(sub);
    } else if (family == "normal_family") {
        spec.ambient = builtin_normal_family(get_param(params, "alpha", 0.0));
    } else if (family == "hessian") {
        int dim = static_cast<int>(get_param(params, "dim", 2));
        std::string potential = get_param_str(
            params, "potential", "x1^2/2 + x2^2/2 + 0.2*exp(x1+x2)");
        spec.ambient =
            builtin_hessian(potential, dim, DomainBox::cube(dim, -0.5, 0.5));
    } else {
        throw std::invalid_argument("generate: unknown family '" + family +
                                    "'");
    }
    return spec;
}

RunResult run_generate(const std::string& family,
                       const std::map<std::string, std::string>& params,
                       const std::string& out_path, const RunConfig& cfg) {
    RunResult r;
    ManifoldSpec spec;
    try {
        spec = generate_family(family, params, cfg.seed);
    } catch (const std::exception& e) {
        return input_error(cfg, "generate", e.what());
    }
    std::string text = write_spec_text(spec);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) return input_error(cfg, "generate",
                                     "cannot write '" + out_path + "'");
        out << text;
    }
    r.report["meta"] = meta_json(cfg, "generate", out_path, fnv1a(text));
    Json j;
    j["name"] = "generate";
    j["family"] = family;
    j["out"] = out_path;
    j["passed"] = true;
    r.report["checks"] = Json::array({j});
    r.report["findings"] = Json::array();
    if (out_path.empty()) r.report["spec_text"] = text;
    r.exit_code = 0;
    return finish(std::move(r), cfg);
}

}  // namespace chenverify
