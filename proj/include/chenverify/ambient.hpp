#pragma once

#include "chenverify/expression.hpp"
#include "chenverify/geometry.hpp"

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace chenverify {

// Chart-level ambient manifold description: metric, dual connection pair
// (explicit coefficients or a totally symmetric cubic form over the
// Levi-Civita connection), optional quaternionic structure (J triple, omega
// one-forms, constant-type constant c), and a sampling domain.

struct ExprMatrix {
    int rows = 0, cols = 0;
    std::vector<ExprAst> entries;  // row-major

    ExprMatrix() = default;
    static ExprMatrix zeros(int r, int c,
                            const std::vector<std::string>& vars);

    const ExprAst& operator()(int i, int j) const {
        return entries[static_cast<size_t>(i * cols + j)];
    }
    ExprAst& operator()(int i, int j) {
        return entries[static_cast<size_t>(i * cols + j)];
    }
    bool empty() const { return entries.empty(); }
};

struct DomainBox {
    Eigen::VectorXd lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    Eigen::VectorXd sample(std::mt19937_64& gen) const;
    static DomainBox cube(int dim, double lo, double hi);
};

enum class ConnectionMode { Skewness, Explicit };

struct AmbientModel {
    std::string name;
    int dim = 0;
    DomainBox domain;
    std::vector<std::string> vars;  // x1..xd

    ExprMatrix metric;  // d x d, symmetric entries

    ConnectionMode mode = ConnectionMode::Skewness;
    std::vector<ExprMatrix> gamma_expr;  // explicit: gamma_expr[k](i,j) = Gamma^k_ij
    std::vector<ExprMatrix> skewness;    // skewness: skewness[a](b,c) = K_abc

    bool has_J = false;
    std::array<ExprMatrix, 3> J;                 // (J_alpha)^i_j entry (i,j)
    std::array<std::vector<ExprAst>, 3> omega;   // omega_alpha(d/dx_i)
    std::optional<double> c;                     // declared constant-type c

    bool quaternionic() const { return has_J; }
};

std::vector<std::string> chart_vars(const std::string& prefix, int dim);

/// Seeded uniform sample points inside the model's domain box.
std::vector<Eigen::VectorXd> sample_points(const DomainBox& box, int count,
                                           uint64_t seed);

// ---------------------------------------------------------------------------
// Pointwise evaluation
// ---------------------------------------------------------------------------

struct AmbientEval {
    Eigen::VectorXd point;
    MetricAtPoint metric;
    Tensor4 d2g;
    ConnectionAtPoint nabla, nabla_star, nabla_circ;  // dgamma all filled
    CurvatureAtPoint R, Rstar, Rcirc;
    bool has_J = false;
    std::array<Eigen::MatrixXd, 3> Jmat, Jstar;
    std::array<Tensor3, 3> dJ;  // dJ[alpha](i,k,j) = d_i (J_alpha)^k_j
    std::array<Eigen::VectorXd, 3> omega;
};

/// Evaluates every ambient symbol at one chart point. In strict mode an
/// asymmetric explicit gamma throws; validators pass strict=false and
/// measure the residual instead.
AmbientEval evaluate_ambient(const AmbientModel& model,
                             const Eigen::VectorXd& x, bool strict = true);

/// The (nabla, nabla*) pair at a point.
std::pair<ConnectionAtPoint, ConnectionAtPoint> connection_at(
    const AmbientModel& model, const Eigen::VectorXd& x);

/// J* = -g^{-1} J^T g, the unique solution of g(JX,Y) + g(X,J*Y) = 0.
Eigen::MatrixXd compute_dual_J(const MetricAtPoint& g,
                               const Eigen::MatrixXd& J);

// ---------------------------------------------------------------------------
// Validators
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    double max_residual = 0;
    double tolerance = 0;
    bool passed = false;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    std::vector<Eigen::VectorXd> points;
    std::vector<std::string> failures;  // per-point evaluation failures

    bool all_passed() const;
    const CheckResult* find(const std::string& name) const;
};

/// Statistical-structure axioms: torsion freeness of both connections,
/// total symmetry of nabla g, the duality identity, and the Levi-Civita
/// average.
ValidationReport validate_statistical(const AmbientModel& model,
                                      const std::vector<Eigen::VectorXd>& pts,
                                      double tol);

/// Quaternionic axioms: quaternion relations, metric adaptedness, the
/// Hermite-like dual identities, and the Kaehler-like covariant-derivative
/// condition.
ValidationReport validate_quaternionic(const AmbientModel& model,
                                       const std::vector<Eigen::VectorXd>& pts,
                                       double tol);

struct ConstantTypeResult {
    double c_fit = 0;
    double residual = 0;                      // vs best-fit c
    std::optional<double> declared_residual;  // vs model.c when declared
    bool degenerate = false;
};

/// Least-squares fit of the constant-type curvature constant c over all
/// lowered components at the sampled points, plus the dual-curvature check
/// with J replaced by J*.
ConstantTypeResult check_constant_type_curvature(
    const AmbientModel& model, const std::vector<Eigen::VectorXd>& pts,
    double tol, uint64_t seed = 0xC4E2);

// ---------------------------------------------------------------------------
// Built-in model spaces
// ---------------------------------------------------------------------------

/// Flat quaternionic space of dimension 4m: identity metric, zero skewness,
/// the standard block-diagonal quaternion triple, omega = 0, c = 0.
AmbientModel builtin_flat_quaternionic(int m);

/// Flat statistical ambient of any dimension (identity metric, zero
/// skewness, no quaternionic structure).
AmbientModel builtin_euclidean(int dim);

/// The (mu, sigma) normal family carrying the Fisher metric and the
/// alpha-connection pair.
AmbientModel builtin_normal_family(double alpha);

/// Round sphere of the given radius in a conformal chart, trivial
/// statistical structure (self-dual).
AmbientModel builtin_round_sphere(int n, double radius);

/// Hessian structure of a strictly convex potential phi over x1..xd:
/// metric = Hessian of phi, skewness = -1/2 third derivatives (the flat
/// affine connection becomes nabla).
AmbientModel builtin_hessian(const std::string& potential, int dim,
                             const DomainBox& domain);

}  // namespace chenverify
