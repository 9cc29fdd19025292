#pragma once

#include "chenverify/inequalities.hpp"
#include "chenverify/specfile.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace chenverify {

// Command layer shared by the CLI binary and the tests: deterministic
// seeded runs, JSON/CSV/text rendering, stable exit codes.
//
// Exit codes: 0 pass, 1 structural/validation failure, 2 input error,
// 3 falsification finding.

using Json = nlohmann::ordered_json;

inline constexpr uint64_t kDefaultSeed = 0xC4E2;
inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
    uint64_t seed = kDefaultSeed;
    int samples = 12;   // sample points
    int planes = 3;     // plane draws per point
    double tol = 1e-8;
    std::string case_selector;    // "", "real", "holomorphic"
    std::string format = "json";  // json | csv | text
    bool delta22 = false;

    // lemma suite
    int n_lo = 3, n_hi = 8;
    long trials = 100000;
    int restarts = 200;
    LemmaConstant lemma_constant = LemmaConstant::Corrected;
};

struct RunResult {
    int exit_code = 0;
    Json report;
    std::string rendered;
};

/// Default seed, overridable through the CHENVERIFY_SEED environment
/// variable (explicit --seed wins over both).
uint64_t env_default_seed();

/// FNV-1a over the spec file text; pinned into report metadata.
uint64_t fnv1a(const std::string& text);

RunResult run_validate(const std::string& spec_path, const RunConfig& cfg);
RunResult run_chen(const std::string& spec_path, const RunConfig& cfg);
RunResult run_lemmas(const RunConfig& cfg);
RunResult run_generate(const std::string& family,
                       const std::map<std::string, std::string>& params,
                       const std::string& out_path, const RunConfig& cfg);

// Instance families used by `generate` and the acceptance suite.
ManifoldSpec generate_family(const std::string& family,
                             const std::map<std::string, std::string>& params,
                             uint64_t seed);

}  // namespace chenverify
