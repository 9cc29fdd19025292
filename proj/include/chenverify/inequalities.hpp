#pragma once

#include "chenverify/submanifold.hpp"

#include <string>
#include <vector>

namespace chenverify {

// The inequality layer: the two algebraic lemmas with their sharpness
// oracles, the curvature inequality reports for one (point, plane[s])
// evaluation, equality-case diagnostics, and the minimality corollaries.

// ---------------------------------------------------------------------------
// Algebraic lemmas
// ---------------------------------------------------------------------------

// The first lemma's bound ships with two constants: Corrected uses
// (n-2)/(2(n-1)), which the stated equality case attains exactly; Printed
// keeps the (n-2)/(2(n-2)) = 1/2 coefficient, a valid but non-sharp bound.
enum class LemmaConstant { Corrected, Printed };

struct LemmaResult {
    double lhs = 0, rhs = 0;
    double margin = 0;  // rhs - lhs, evaluated in the cancellation-free form
    bool holds = false;
    bool equality = false;
};

/// sum_{i<j} a_i a_j - a_1 a_2 <= coeff * (sum a_i)^2, n >= 3.
LemmaResult lemma_chen_first(const Eigen::VectorXd& a,
                             LemmaConstant variant = LemmaConstant::Corrected);

/// sum_{i<j} a_i a_j - a_1 a_2 - a_3 a_4 <= (n-3)/(2(n-2)) (sum a_i)^2,
/// n >= 4.
LemmaResult lemma_chen_delta22(const Eigen::VectorXd& a);

struct LemmaScan {
    int n = 0;
    long trials = 0;
    double worst_margin = 0;          // min margin over random tuples
    double max_overshoot = 0;         // max(lhs - rhs) over maximizer runs
    double maximizer_pattern_gap = 0; // deviation from the equality pattern
    double maximizer_margin = 0;      // rhs - lhs at the best maximizer
};

/// Random-tuple scan plus projected-gradient maximization on the hyperplane
/// sum a_i = n (the objective is concave there, so the ascent is global).
LemmaScan scan_lemma_chen_first(int n, long trials, int restarts,
                                uint64_t seed,
                                LemmaConstant variant = LemmaConstant::Corrected);
LemmaScan scan_lemma_delta22(int n, long trials, int restarts, uint64_t seed);

// ---------------------------------------------------------------------------
// Inequality reports
// ---------------------------------------------------------------------------

enum class InequalityKind { ChenFirst, Delta22 };

// Real is the unambiguous totally-real case. The two holomorphic variants
// track the statement/proof disagreement on the P-block constant: the
// statement carries 1/2 (tr P)^2, the proof display (tr P)^2.
enum class TheoremCase { Real, HolomorphicPrinted, HolomorphicProofVariant };

const char* to_string(InequalityKind k);
const char* to_string(TheoremCase c);

struct TermEntry {
    std::string name;
    double value = 0;
};

struct EqualityDiagnostics {
    std::vector<double> residuals;  // per normal direction
    double max_residual = 0;
    double tolerance = 0;
    bool equality = false;
};

struct InequalityReport {
    InequalityKind kind = InequalityKind::ChenFirst;
    TheoremCase theorem_case = TheoremCase::Real;
    SubClass classification = SubClass::Generic;
    int n = 0;
    double c = 0;
    double tolerance = 0;

    double lhs = 0, rhs = 0, margin = 0;
    bool holds = false;

    // named summands; lhs/rhs are exactly the sums of their term lists
    std::vector<TermEntry> lhs_terms, rhs_terms, info_terms;
    double const_term = 0, p_block = 0, j_pairing = 0, mean_curv_term = 0,
           ambient_term = 0;

    double tau = 0, tau_circ = 0, tauhat_circ = 0;
    double K_pi = 0, K_circ_pi = 0, Khat_circ_pi = 0;
    double K_pi2 = 0, K_circ_pi2 = 0, Khat_circ_pi2 = 0;  // delta22 only
    double H_norm2 = 0, Hstar_norm2 = 0;

    EqualityDiagnostics equality;
};

/// Theorem coefficients, exposed for the rational-arithmetic probes.
double chen_first_constant(double c, int n);        // c/8 (n-2)(n-1)
double chen_first_constant_hol(double c, int n);    // c/8 (n-2)(n+1)
double mean_curvature_coefficient(int n);           // n^2 (n-2) / (4(n-1))
double delta22_constant(double c, int n);           // c/8 (n^2 - n - 4)

/// One Chen-first evaluation at a point. The plane lives in the orthonormal
/// tangent frame (two euclidean-orthonormal n-vectors); the tangent frame is
/// rotated so e1, e2 span it, which is the frame the equality conditions
/// refer to.
InequalityReport chen_first_report(const InducedData& data, const Plane& plane,
                                   TheoremCase tcase, double c,
                                   double tol = 1e-8);

/// delta(2,2) evaluation with two mutually orthogonal planes.
InequalityReport delta22_report(const InducedData& data, const Plane& pi1,
                                const Plane& pi2, TheoremCase tcase, double c,
                                double tol = 1e-8);

/// Equality-pattern residuals straight from a sigma/sigma* pair (first index
/// is the normal slot). ChenFirst: s11+s22 = s33 = ... = snn, off-diagonals
/// zero. Delta22: s11+s22 = s33+s44 = s55 = ... = snn.
std::vector<double> equality_pattern_residuals(const Tensor3& sigma,
                                               const Tensor3& sigma_star,
                                               InequalityKind kind);
EqualityDiagnostics equality_case_check(const InducedData& data,
                                        InequalityKind kind,
                                        double tol = 1e-8);

bool minimality_check(const InducedData& data, double tol);

enum class NonminimalityDiagnosis {
    CriterionSilent,
    CriterionFires,     // fired and the instance is indeed non-minimal
    Contradiction       // fired on a minimal instance: falsification evidence
};

const char* to_string(NonminimalityDiagnosis d);

/// Totally-real non-minimality corollaries: if the LHS drops below the
/// constant-plus-ambient threshold the submanifold cannot be minimal.
NonminimalityDiagnosis nonminimality_criterion(const InequalityReport& report,
                                               const InducedData& data,
                                               double h_tol = 1e-6);

}  // namespace chenverify
