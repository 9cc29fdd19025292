#include "chenverify/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace chenverify {

namespace {

constexpr double kSymTol = 1e-10;

}  // namespace

MetricAtPoint::MetricAtPoint(Eigen::MatrixXd g_in, Tensor3 dg_in)
    : dim(static_cast<int>(g_in.rows())), g(std::move(g_in)),
      dg(std::move(dg_in)) {
    if (g.rows() != g.cols())
        throw std::invalid_argument("MetricAtPoint: g not square");
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > kSymTol)
        throw std::invalid_argument("MetricAtPoint: g not symmetric");
    g = 0.5 * (g + g.transpose().eval());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    if (es.eigenvalues().minCoeff() <= 1e-10)
        throw std::invalid_argument(
            "MetricAtPoint: g not positive definite (min eigenvalue " +
            std::to_string(es.eigenvalues().minCoeff()) + ")");

    g_inv = g.inverse();
    double inv_gap =
        (g * g_inv - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (inv_gap > 1e-10)
        throw std::invalid_argument("MetricAtPoint: inverse residual " +
                                    std::to_string(inv_gap));

    if (dg.empty()) dg = Tensor3(dim, dim, dim);
    if (dg.dim0() != dim || dg.dim1() != dim || dg.dim2() != dim)
        throw std::invalid_argument("MetricAtPoint: dg dimension mismatch");
    for (int k = 0; k < dim; ++k)
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j)
                if (std::abs(dg(k, i, j) - dg(k, j, i)) > kSymTol)
                    throw std::invalid_argument(
                        "MetricAtPoint: dg not symmetric in (i,j)");
}

Tensor4 CurvatureAtPoint::lowered(const MetricAtPoint& m) const {
    const int d = m.dim;
    Tensor4 low(d, d, d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    double acc = 0;
                    for (int mm = 0; mm < d; ++mm)
                        acc += m.g(l, mm) * r(mm, i, j, k);
                    low(i, j, k, l) = acc;
                }
    return low;
}

ConnectionAtPoint levi_civita(const MetricAtPoint& m) {
    const int d = m.dim;
    ConnectionAtPoint out;
    out.gamma = Tensor3(d, d, d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                double acc = 0;
                for (int l = 0; l < d; ++l)
                    acc += m.g_inv(k, l) *
                           (m.dg(i, j, l) + m.dg(j, i, l) - m.dg(l, i, j));
                acc *= 0.5;
                out.gamma(k, i, j) = acc;
                out.gamma(k, j, i) = acc;
            }
    return out;
}

ConnectionAtPoint levi_civita(const MetricAtPoint& m, const Tensor4& d2g) {
    ConnectionAtPoint out = levi_civita(m);
    const int d = m.dim;
    out.dgamma = Tensor4(d, d, d, d);
    // d_m g^{kl} = -g^{ka} (d_m g_ab) g^{bl}
    std::vector<Eigen::MatrixXd> dginv(static_cast<size_t>(d));
    for (int mm = 0; mm < d; ++mm) {
        Eigen::MatrixXd dgm(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) dgm(a, b) = m.dg(mm, a, b);
        dginv[static_cast<size_t>(mm)] = -m.g_inv * dgm * m.g_inv;
    }
    for (int mm = 0; mm < d; ++mm)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) {
                    double acc = 0;
                    for (int l = 0; l < d; ++l) {
                        double sym =
                            m.dg(i, j, l) + m.dg(j, i, l) - m.dg(l, i, j);
                        double dsym = d2g(mm, i, j, l) + d2g(mm, j, i, l) -
                                      d2g(mm, l, i, j);
                        acc += dginv[static_cast<size_t>(mm)](k, l) * sym +
                               m.g_inv(k, l) * dsym;
                    }
                    acc *= 0.5;
                    out.dgamma(mm, k, i, j) = acc;
                    out.dgamma(mm, k, j, i) = acc;
                }
    return out;
}

ConnectionAtPoint dual_connection(const MetricAtPoint& m,
                                  const ConnectionAtPoint& conn) {
    const int d = m.dim;
    ConnectionAtPoint out;
    out.gamma = Tensor3(d, d, d);
    for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) {
                double acc = 0;
                for (int j = 0; j < d; ++j) {
                    double rhs = m.dg(i, j, k);
                    for (int mm = 0; mm < d; ++mm)
                        rhs -= conn.gamma(mm, i, j) * m.g(mm, k);
                    acc += m.g_inv(l, j) * rhs;
                }
                out.gamma(l, i, k) = acc;
            }
    return out;
}

ConnectionAtPoint dual_connection(const MetricAtPoint& m,
                                  const ConnectionAtPoint& conn,
                                  const Tensor4& d2g) {
    ConnectionAtPoint out = dual_connection(m, conn);
    if (!conn.has_derivatives())
        throw std::invalid_argument(
            "dual_connection: conn.dgamma required for derivative output");
    const int d = m.dim;
    std::vector<Eigen::MatrixXd> dginv(static_cast<size_t>(d));
    for (int nn = 0; nn < d; ++nn) {
        Eigen::MatrixXd dgn(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) dgn(a, b) = m.dg(nn, a, b);
        dginv[static_cast<size_t>(nn)] = -m.g_inv * dgn * m.g_inv;
    }
    out.dgamma = Tensor4(d, d, d, d);
    for (int nn = 0; nn < d; ++nn)
        for (int l = 0; l < d; ++l)
            for (int i = 0; i < d; ++i)
                for (int k = 0; k < d; ++k) {
                    double acc = 0;
                    for (int j = 0; j < d; ++j) {
                        double rhs = m.dg(i, j, k);
                        double drhs = d2g(nn, i, j, k);
                        for (int mm = 0; mm < d; ++mm) {
                            rhs -= conn.gamma(mm, i, j) * m.g(mm, k);
                            drhs -= conn.dgamma(nn, mm, i, j) * m.g(mm, k) +
                                    conn.gamma(mm, i, j) * m.dg(nn, mm, k);
                        }
                        acc += dginv[static_cast<size_t>(nn)](l, j) * rhs +
                               m.g_inv(l, j) * drhs;
                    }
                    out.dgamma(nn, l, i, k) = acc;
                }
    return out;
}

CurvatureAtPoint curvature(const ConnectionAtPoint& conn) {
    if (!conn.has_derivatives())
        throw std::invalid_argument("curvature: connection lacks dgamma");
    const int d = static_cast<int>(conn.gamma.dim0());
    CurvatureAtPoint out;
    out.r = Tensor4(d, d, d, d);
    for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    double acc =
                        conn.dgamma(i, l, j, k) - conn.dgamma(j, l, i, k);
                    for (int mm = 0; mm < d; ++mm)
                        acc += conn.gamma(l, i, mm) * conn.gamma(mm, j, k) -
                               conn.gamma(l, j, mm) * conn.gamma(mm, i, k);
                    out.r(l, i, j, k) = acc;
                    out.r(l, j, i, k) = -acc;  // antisymmetry by construction
                }
    return out;
}

double curvature_pairing(const MetricAtPoint& m, const CurvatureAtPoint& R,
                         const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                         const Eigen::VectorXd& Z, const Eigen::VectorXd& W) {
    const int d = m.dim;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    for (int l = 0; l < d; ++l) {
        double acc = 0;
        for (int i = 0; i < d; ++i) {
            if (X[i] == 0.0) continue;
            for (int j = 0; j < d; ++j) {
                if (Y[j] == 0.0) continue;
                double xy = X[i] * Y[j];
                for (int k = 0; k < d; ++k)
                    acc += R.r(l, i, j, k) * xy * Z[k];
            }
        }
        v[l] = acc;
    }
    return v.dot(m.g * W);
}

namespace {

void require_unit_pair(const MetricAtPoint& m, const Eigen::VectorXd& X,
                       const Eigen::VectorXd& Y, const char* who) {
    double xx = X.dot(m.g * X), yy = Y.dot(m.g * Y), xy = X.dot(m.g * Y);
    if (std::abs(xx - 1.0) > 1e-10 || std::abs(yy - 1.0) > 1e-10 ||
        std::abs(xy) > 1e-10)
        throw std::invalid_argument(std::string(who) +
                                    ": basis not g-orthonormal");
}

double k_bracket(const MetricAtPoint& m, const CurvatureAtPoint& R,
                 const CurvatureAtPoint& Rstar, const CurvatureAtPoint& Rcirc,
                 const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                 KConvention conv) {
    double p = curvature_pairing(m, R, X, Y, Y, X);
    double ps = curvature_pairing(m, Rstar, X, Y, Y, X);
    double pc = curvature_pairing(m, Rcirc, X, Y, Y, X);
    double w = conv == KConvention::ProofWeight ? 2.0 : 1.0;
    return 0.5 * (p + ps - w * pc);
}

}  // namespace

double sectional_K(const MetricAtPoint& m, const CurvatureAtPoint& R,
                   const CurvatureAtPoint& Rstar, const CurvatureAtPoint& Rcirc,
                   const Plane& plane, KConvention conv) {
    require_unit_pair(m, plane.x, plane.y, "sectional_K");
    return k_bracket(m, R, Rstar, Rcirc, plane.x, plane.y, conv);
}

double scalar_tau(const MetricAtPoint& m, const CurvatureAtPoint& R,
                  const CurvatureAtPoint& Rstar, const CurvatureAtPoint& Rcirc,
                  const Frame& frame, KConvention conv) {
    const int n = frame.size();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            require_unit_pair(m, frame.vectors[static_cast<size_t>(i)],
                              frame.vectors[static_cast<size_t>(j)],
                              "scalar_tau");
    double acc = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            acc += k_bracket(m, R, Rstar, Rcirc,
                             frame.vectors[static_cast<size_t>(i)],
                             frame.vectors[static_cast<size_t>(j)], conv);
    return acc;
}

Frame gram_schmidt(const MetricAtPoint& m,
                   const std::vector<Eigen::VectorXd>& vectors) {
    MatX<double> g = m.g;
    auto out = gram_schmidt_generic<double>(g, vectors,
                                            /*skip_dependent=*/false);
    Frame f;
    f.vectors = std::move(out);
    return f;
}

}  // namespace chenverify
