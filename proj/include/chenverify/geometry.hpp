#pragma once

#include "chenverify/linalg.hpp"
#include "chenverify/tensors.hpp"

#include <Eigen/Dense>

#include <vector>

namespace chenverify {

// Pointwise multilinear algebra for one chart point: metric with first
// derivatives, connection coefficients with first derivatives, curvature
// tensors, plane/frame types, and the sectional K-curvature machinery for
// dual connections.
//
// Index conventions (fixed project-wide):
//   dg(k,i,j)        = d_k g_ij
//   d2g(m,k,i,j)     = d_m d_k g_ij
//   gamma(k,i,j)     = Gamma^k_ij          (symmetric in i,j)
//   dgamma(l,k,i,j)  = d_l Gamma^k_ij
//   r(l,i,j,k)       : R(e_i,e_j)e_k = sum_l r(l,i,j,k) e_l, i.e.
//                      R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik
//                              + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
//   lowered(i,j,k,l) = g(R(e_i,e_j)e_k, e_l)

struct MetricAtPoint {
    int dim = 0;
    Eigen::MatrixXd g;
    Eigen::MatrixXd g_inv;
    Tensor3 dg;

    MetricAtPoint() = default;
    /// Validates symmetry, positive definiteness (smallest eigenvalue >
    /// 1e-10), inverse accuracy, and dg symmetry in (i,j).
    MetricAtPoint(Eigen::MatrixXd g_in, Tensor3 dg_in);
};

struct ConnectionAtPoint {
    Tensor3 gamma;
    Tensor4 dgamma;  // empty when first derivatives were not requested

    bool has_derivatives() const { return !dgamma.empty(); }
};

struct CurvatureAtPoint {
    Tensor4 r;

    /// g(R(e_i,e_j)e_k, e_l) for the whole index range.
    Tensor4 lowered(const MetricAtPoint& m) const;
};

struct Plane {
    Eigen::VectorXd x, y;
};

enum class FrameKind { Tangent, Normal };

struct Frame {
    std::vector<Eigen::VectorXd> vectors;
    FrameKind kind = FrameKind::Tangent;

    int size() const { return static_cast<int>(vectors.size()); }
};

// Which weight the Levi-Civita term carries inside the sectional
// K-curvature bracket. ProofWeight (-2 LC, i.e. K = (R + R*)/2 - LC
// pairings) matches the Opozda construction and is the project default;
// SectionWeight keeps a single -1 LC term and exists for comparison runs.
enum class KConvention { ProofWeight, SectionWeight };

/// Christoffel symbols of g. With d2g supplied, dgamma is filled too.
ConnectionAtPoint levi_civita(const MetricAtPoint& m);
ConnectionAtPoint levi_civita(const MetricAtPoint& m, const Tensor4& d2g);

/// Solves the duality identity d_i g_jk = Gamma^m_ij g_mk + Gamma*^m_ik g_jm
/// for the dual connection. With d2g and conn.dgamma supplied, the dual's
/// dgamma is filled too.
ConnectionAtPoint dual_connection(const MetricAtPoint& m,
                                  const ConnectionAtPoint& conn);
ConnectionAtPoint dual_connection(const MetricAtPoint& m,
                                  const ConnectionAtPoint& conn,
                                  const Tensor4& d2g);

/// Coordinate curvature tensor of a connection with first derivatives.
CurvatureAtPoint curvature(const ConnectionAtPoint& conn);

/// g(R(X,Y)Z, W)
double curvature_pairing(const MetricAtPoint& m, const CurvatureAtPoint& R,
                         const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                         const Eigen::VectorXd& Z, const Eigen::VectorXd& W);

/// Sectional K-curvature of an orthonormal plane built from the two dual
/// curvatures and the Levi-Civita curvature.
double sectional_K(const MetricAtPoint& m, const CurvatureAtPoint& R,
                   const CurvatureAtPoint& Rstar, const CurvatureAtPoint& Rcirc,
                   const Plane& plane,
                   KConvention conv = KConvention::ProofWeight);

/// Scalar curvature: the same bracket summed over all i<j frame planes.
double scalar_tau(const MetricAtPoint& m, const CurvatureAtPoint& R,
                  const CurvatureAtPoint& Rstar, const CurvatureAtPoint& Rcirc,
                  const Frame& frame,
                  KConvention conv = KConvention::ProofWeight);

/// g-orthonormalization; throws RankDeficiency naming the failing index.
Frame gram_schmidt(const MetricAtPoint& m,
                   const std::vector<Eigen::VectorXd>& vectors);

}  // namespace chenverify
