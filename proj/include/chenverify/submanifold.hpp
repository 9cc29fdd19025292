#pragma once

#include "chenverify/ambient.hpp"
#include "chenverify/specfile.hpp"

#include <array>

namespace chenverify {

// Immersed statistical submanifolds. All pointwise data is computed along
// the immersion with jets in the submanifold chart: frame fields carry two
// derivative orders, connection-level coefficients one, so the induced and
// normal-bundle curvatures come from actual derivatives of the induced
// coefficients and the Gauss/Ricci equations stay independent checks.

struct ImmersedSubmanifold {
    AmbientModel ambient;
    int n = 0;
    DomainBox domain;
    std::vector<std::string> vars;   // u1..un
    std::vector<ExprAst> immersion;  // d components over vars
    std::vector<std::vector<ExprAst>> immersion_du;  // [k][a] = d f^k / d u_a

    static ImmersedSubmanifold create(AmbientModel amb, SubmanifoldSpec spec);
};

enum class SubClass { Invariant, TotallyReal, LagrangianLike, Generic };

const char* to_string(SubClass c);

struct ClassificationDiag {
    double max_tangent_alignment = 0;  // max_a,i |tan part of J_a e_i|
    double max_normal_alignment = 0;   // max_a,i |normal part of J_a e_i|
    double normal_span_gap = 0;        // smallest singular value of the
                                       // J-image span inside the normal space
    std::array<double, 3> tangent_alignment{};  // per J_a maxima
    std::array<double, 3> normal_alignment{};
};

struct InducedData {
    int n = 0, d = 0;
    Eigen::VectorXd chart_point, ambient_point;
    Eigen::MatrixXd jacobian;         // d x n
    Eigen::MatrixXd tangent_chart;    // n x n, e_i = sum_a E(a,i) d/du_a
    Eigen::MatrixXd tangent_ambient;  // d x n
    Eigen::MatrixXd normal_ambient;   // d x (d-n)
    Eigen::MatrixXd induced_g;        // coordinate-basis induced metric

    // second fundamental forms in the orthonormal tangent frame and in
    // chart coordinates; first index is the normal-frame slot
    Tensor3 sigma, sigma_star;
    Tensor3 sigma_chart, sigma_star_chart;

    // shape operators per normal-frame vector; entries (A)(i,j) =
    // g(A e_i, e_j) in the orthonormal frame
    std::vector<Eigen::MatrixXd> A, Astar;

    Eigen::VectorXd H_coeff, Hstar_coeff;  // normal-frame coefficients
    Eigen::VectorXd H_ambient, Hstar_ambient;
    double H_norm2 = 0, Hstar_norm2 = 0;

    // curvature tensors lowered into the orthonormal frames:
    //   *_frame(i,j,k,l)  = g(R(e_i,e_j)e_k, e_l)       (induced)
    //   amb*_frame        = ambient curvature restricted to tangent frame
    //   amb*_mixed(i,j,g,h) = ghat(Rhat(e_i,e_j)xi_g, xi_h)
    //   Rperp(i,j,g,h)      = ghat(Rperp(e_i,e_j)xi_g, xi_h)
    Tensor4 R_frame, Rstar_frame, Rcirc_frame;
    Tensor4 ambR_frame, ambRstar_frame, ambRcirc_frame;
    Tensor4 ambR_mixed, ambRstar_mixed;
    Tensor4 Rperp, Rstar_perp;

    bool has_J = false;
    // tangential parts of J_a / J*_a paired against the frame:
    // P[a](i,j) = ghat(J_a e_i, e_j)
    std::array<Eigen::MatrixXd, 3> P, Pstar;
    ClassificationDiag alignment;
};

/// Full pointwise evaluation; throws on rank deficiency of the immersion.
InducedData induced_data(const ImmersedSubmanifold& sub,
                         const Eigen::VectorXd& u);

struct PAlphaInvariants {
    double tr_P = 0, norm2_P = 0, tr_PPstar = 0;
};

/// (tr P_a, |P_a|^2, tr(P_a P*_a)) for a = 1,2,3.
std::array<PAlphaInvariants, 3> p_alpha_invariants(const InducedData& data);

SubClass classify_at(const InducedData& data, double tol);

/// Aggregated classification over sampled points (alignment maxima over the
/// whole sample decide the label).
SubClass classify(const ImmersedSubmanifold& sub,
                  const std::vector<Eigen::VectorXd>& pts, double tol = 1e-6);

struct GaussRicciResiduals {
    double gauss = 0, gauss_star = 0, ricci = 0, ricci_star = 0;

    double max_residual() const {
        return std::max(std::max(gauss, gauss_star),
                        std::max(ricci, ricci_star));
    }
};

/// Residuals of the four displayed Gauss/Ricci equations over seeded random
/// unit tangent/normal tuples.
GaussRicciResiduals gauss_ricci_residuals(const InducedData& data, int trials,
                                          uint64_t seed);
GaussRicciResiduals gauss_ricci_residuals(const ImmersedSubmanifold& sub,
                                          const Eigen::VectorXd& u, int trials,
                                          uint64_t seed = 0xC4E2);

}  // namespace chenverify
