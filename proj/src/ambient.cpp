#include "chenverify/ambient.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chenverify {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ExprMatrix ExprMatrix::zeros(int r, int c,
                             const std::vector<std::string>& vars) {
    ExprMatrix m;
    m.rows = r;
    m.cols = c;
    m.entries.assign(static_cast<size_t>(r * c), ExprAst::constant(0.0, vars));
    return m;
}

Eigen::VectorXd DomainBox::sample(std::mt19937_64& gen) const {
    Eigen::VectorXd x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        x[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(gen);
    return x;
}

DomainBox DomainBox::cube(int dim, double l, double h) {
    DomainBox b;
    b.lo = Eigen::VectorXd::Constant(dim, l);
    b.hi = Eigen::VectorXd::Constant(dim, h);
    return b;
}

std::vector<std::string> chart_vars(const std::string& prefix, int dim) {
    std::vector<std::string> v;
    v.reserve(static_cast<size_t>(dim));
    for (int i = 1; i <= dim; ++i) v.push_back(prefix + std::to_string(i));
    return v;
}

std::vector<Eigen::VectorXd> sample_points(const DomainBox& box, int count,
                                           uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) pts.push_back(box.sample(gen));
    return pts;
}

// ---------------------------------------------------------------------------
// Pointwise evaluation
// ---------------------------------------------------------------------------

AmbientEval evaluate_ambient(const AmbientModel& model,
                             const Eigen::VectorXd& x, bool strict) {
    const int d = model.dim;
    if (x.size() != d)
        throw std::invalid_argument("evaluate_ambient: point dimension " +
                                    std::to_string(x.size()) + " != " +
                                    std::to_string(d));
    AmbientEval ev;
    ev.point = x;

    // metric with first and second derivatives
    Eigen::MatrixXd g(d, d);
    Tensor3 dg(d, d, d);
    ev.d2g = Tensor4(d, d, d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            const ExprAst& e = model.metric(i, j);
            if (e.is_constant()) {
                double v = e.eval_value(x);
                g(i, j) = g(j, i) = v;
                continue;
            }
            Jet2 jv = e.eval_jet(x);
            g(i, j) = g(j, i) = jv.value;
            for (int k = 0; k < d; ++k) {
                dg(k, i, j) = jv.grad[k];
                dg(k, j, i) = jv.grad[k];
                for (int m = 0; m < d; ++m) {
                    ev.d2g(m, k, i, j) = jv.hess(m, k);
                    ev.d2g(m, k, j, i) = jv.hess(m, k);
                }
            }
        }
    ev.metric = MetricAtPoint(g, dg);
    ev.nabla_circ = levi_civita(ev.metric, ev.d2g);

    const Eigen::MatrixXd& ginv = ev.metric.g_inv;
    std::vector<Eigen::MatrixXd> dginv(static_cast<size_t>(d));
    for (int n = 0; n < d; ++n) {
        Eigen::MatrixXd dgn(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) dgn(a, b) = dg(n, a, b);
        dginv[static_cast<size_t>(n)] = -ginv * dgn * ginv;
    }

    if (model.mode == ConnectionMode::Skewness) {
        // K values and first derivatives; K is stored totally symmetric
        Tensor3 K(d, d, d);
        Tensor4 dK(d, d, d, d);
        bool any = false;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c) {
                    const ExprAst& e = model.skewness[static_cast<size_t>(a)](
                        b, c);
                    if (e.is_constant_zero()) continue;
                    any = true;
                    Dual dv = e.eval_dual(x);
                    K(a, b, c) = dv.value;
                    if (!dv.is_constant())
                        for (int n = 0; n < d; ++n) dK(n, a, b, c) = dv.grad[n];
                }
        ev.nabla = ev.nabla_circ;
        ev.nabla_star = ev.nabla_circ;
        if (any) {
            // K-sharp^k_ij = g^{kl} K_lij, nabla = LC + K#, nabla* = LC - K#
            for (int k = 0; k < d; ++k)
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) {
                        double ks = 0;
                        for (int l = 0; l < d; ++l)
                            ks += ginv(k, l) * K(l, i, j);
                        ev.nabla.gamma(k, i, j) += ks;
                        ev.nabla_star.gamma(k, i, j) -= ks;
                        for (int n = 0; n < d; ++n) {
                            double dks = 0;
                            for (int l = 0; l < d; ++l)
                                dks += dginv[static_cast<size_t>(n)](k, l) *
                                           K(l, i, j) +
                                       ginv(k, l) * dK(n, l, i, j);
                            ev.nabla.dgamma(n, k, i, j) += dks;
                            ev.nabla_star.dgamma(n, k, i, j) -= dks;
                        }
                    }
        }
    } else {
        ConnectionAtPoint conn;
        conn.gamma = Tensor3(d, d, d);
        conn.dgamma = Tensor4(d, d, d, d);
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    const ExprAst& e =
                        model.gamma_expr[static_cast<size_t>(k)](i, j);
                    if (e.is_constant_zero()) continue;
                    Dual dv = e.eval_dual(x);
                    conn.gamma(k, i, j) = dv.value;
                    if (!dv.is_constant())
                        for (int n = 0; n < d; ++n)
                            conn.dgamma(n, k, i, j) = dv.grad[n];
                }
        if (strict) {
            for (int k = 0; k < d; ++k)
                for (int i = 0; i < d; ++i)
                    for (int j = i + 1; j < d; ++j)
                        if (std::abs(conn.gamma(k, i, j) -
                                     conn.gamma(k, j, i)) > 1e-10)
                            throw std::invalid_argument(
                                "evaluate_ambient: asymmetric explicit gamma "
                                "(torsion) at Gamma^" +
                                std::to_string(k + 1) + "_" +
                                std::to_string(i + 1) +
                                std::to_string(j + 1));
        }
        ev.nabla = conn;
        ev.nabla_star = dual_connection(ev.metric, conn, ev.d2g);
    }

    ev.R = curvature(ev.nabla);
    ev.Rstar = curvature(ev.nabla_star);
    ev.Rcirc = curvature(ev.nabla_circ);

    ev.has_J = model.has_J;
    if (model.has_J) {
        for (int alpha = 0; alpha < 3; ++alpha) {
            Eigen::MatrixXd Jm = Eigen::MatrixXd::Zero(d, d);
            Tensor3 dJ(d, d, d);
            const ExprMatrix& je = model.J[static_cast<size_t>(alpha)];
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    const ExprAst& e = je(i, j);
                    if (e.is_constant_zero()) continue;
                    Dual dv = e.eval_dual(x);
                    Jm(i, j) = dv.value;
                    if (!dv.is_constant())
                        for (int n = 0; n < d; ++n) dJ(n, i, j) = dv.grad[n];
                }
            ev.Jmat[static_cast<size_t>(alpha)] = Jm;
            ev.dJ[static_cast<size_t>(alpha)] = dJ;
            ev.Jstar[static_cast<size_t>(alpha)] =
                compute_dual_J(ev.metric, Jm);

            Eigen::VectorXd om = Eigen::VectorXd::Zero(d);
            const auto& oe = model.omega[static_cast<size_t>(alpha)];
            for (int i = 0; i < d && i < static_cast<int>(oe.size()); ++i)
                if (!oe[static_cast<size_t>(i)].is_constant_zero())
                    om[i] = oe[static_cast<size_t>(i)].eval_value(x);
            ev.omega[static_cast<size_t>(alpha)] = om;
        }
    }
    return ev;
}

std::pair<ConnectionAtPoint, ConnectionAtPoint> connection_at(
    const AmbientModel& model, const Eigen::VectorXd& x) {
    AmbientEval ev = evaluate_ambient(model, x, /*strict=*/true);
    return {ev.nabla, ev.nabla_star};
}

Eigen::MatrixXd compute_dual_J(const MetricAtPoint& g,
                               const Eigen::MatrixXd& J) {
    return -g.g_inv * J.transpose() * g.g;
}

// ---------------------------------------------------------------------------
// Validators
// ---------------------------------------------------------------------------

bool ValidationReport::all_passed() const {
    if (!failures.empty()) return false;
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.passed; });
}

const CheckResult* ValidationReport::find(const std::string& name) const {
    for (const CheckResult& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

struct ResidualAccumulator {
    std::vector<std::pair<std::string, double>> named;

    void bump(const std::string& name, double v) {
        for (auto& [n, r] : named)
            if (n == name) {
                r = std::max(r, std::abs(v));
                return;
            }
        named.emplace_back(name, std::abs(v));
    }

    void emit(ValidationReport& rep, double tol) const {
        for (const auto& [n, r] : named)
            rep.checks.push_back({n, r, tol, r <= tol});
    }
};

}  // namespace

ValidationReport validate_statistical(const AmbientModel& model,
                                      const std::vector<Eigen::VectorXd>& pts,
                                      double tol) {
    if (pts.empty())
        throw std::invalid_argument(
            "validate_statistical: at least one sample point required");
    ValidationReport rep;
    rep.points = pts;
    const int d = model.dim;
    ResidualAccumulator acc;
    acc.bump("torsion_nabla", 0);
    acc.bump("torsion_nabla_star", 0);
    acc.bump("nabla_g_total_symmetry", 0);
    acc.bump("duality_identity", 0);
    acc.bump("connection_average", 0);

    for (const Eigen::VectorXd& x : pts) {
        AmbientEval ev;
        try {
            ev = evaluate_ambient(model, x, /*strict=*/false);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "point (" << x.transpose() << "): " << e.what();
            rep.failures.push_back(os.str());
            continue;
        }
        const auto& g = ev.metric.g;
        const auto& dg = ev.metric.dg;
        const auto& G = ev.nabla.gamma;
        const auto& Gs = ev.nabla_star.gamma;
        const auto& Gc = ev.nabla_circ.gamma;

        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    acc.bump("torsion_nabla", G(k, i, j) - G(k, j, i));
                    acc.bump("torsion_nabla_star", Gs(k, i, j) - Gs(k, j, i));
                    acc.bump("connection_average",
                             0.5 * (G(k, i, j) + Gs(k, i, j)) - Gc(k, i, j));
                }
        // (nabla_i g)_jk = d_i g_jk - G^m_ij g_mk - G^m_ik g_jm
        auto nabla_g = [&](int i, int j, int k) {
            double v = dg(i, j, k);
            for (int m = 0; m < d; ++m)
                v -= G(m, i, j) * g(m, k) + G(m, i, k) * g(j, m);
            return v;
        };
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    acc.bump("nabla_g_total_symmetry",
                             nabla_g(i, j, k) - nabla_g(j, i, k));
                    double rhs = 0;
                    for (int m = 0; m < d; ++m)
                        rhs += G(m, i, j) * g(m, k) + Gs(m, i, k) * g(j, m);
                    acc.bump("duality_identity", dg(i, j, k) - rhs);
                }
    }
    acc.emit(rep, tol);
    return rep;
}

ValidationReport validate_quaternionic(const AmbientModel& model,
                                       const std::vector<Eigen::VectorXd>& pts,
                                       double tol) {
    if (!model.has_J)
        throw std::invalid_argument(
            "validate_quaternionic: model has no quaternionic structure");
    if (pts.empty())
        throw std::invalid_argument(
            "validate_quaternionic: at least one sample point required");
    ValidationReport rep;
    rep.points = pts;
    const int d = model.dim;
    ResidualAccumulator acc;
    acc.bump("quaternion_relations", 0);
    acc.bump("metric_adaptedness", 0);
    acc.bump("hermite_like", 0);
    acc.bump("kaehler_like", 0);

    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    for (const Eigen::VectorXd& x : pts) {
        AmbientEval ev;
        try {
            ev = evaluate_ambient(model, x, /*strict=*/false);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "point (" << x.transpose() << "): " << e.what();
            rep.failures.push_back(os.str());
            continue;
        }
        const auto& g = ev.metric.g;
        for (int a = 0; a < 3; ++a) {
            int a1 = (a + 1) % 3, a2 = (a + 2) % 3;
            const Eigen::MatrixXd& Ja = ev.Jmat[size_t(a)];
            const Eigen::MatrixXd& Jb = ev.Jmat[size_t(a1)];
            const Eigen::MatrixXd& Jc = ev.Jmat[size_t(a2)];
            acc.bump("quaternion_relations",
                     (Ja * Ja + id).cwiseAbs().maxCoeff());
            acc.bump("quaternion_relations",
                     (Ja * Jb - Jc).cwiseAbs().maxCoeff());
            acc.bump("quaternion_relations",
                     (Jb * Ja + Jc).cwiseAbs().maxCoeff());
            acc.bump("metric_adaptedness",
                     (Ja.transpose() * g * Ja - g).cwiseAbs().maxCoeff());

            const Eigen::MatrixXd& Js = ev.Jstar[size_t(a)];
            acc.bump("hermite_like",
                     (Ja.transpose() * g + g * Js).cwiseAbs().maxCoeff());
            acc.bump("hermite_like",
                     (compute_dual_J(ev.metric, Js) - Ja)
                         .cwiseAbs()
                         .maxCoeff());
            acc.bump("hermite_like",
                     (Ja.transpose() * g * Js - g).cwiseAbs().maxCoeff());

            // (nabla_i J_a)^k_j = omega_{a+2}(i) (J_{a+1})^k_j
            //                   - omega_{a+1}(i) (J_{a+2})^k_j
            for (int i = 0; i < d; ++i)
                for (int k = 0; k < d; ++k)
                    for (int j = 0; j < d; ++j) {
                        double cov = ev.dJ[size_t(a)](i, k, j);
                        for (int m = 0; m < d; ++m)
                            cov += ev.nabla.gamma(k, i, m) * Ja(m, j) -
                                   ev.nabla.gamma(m, i, j) * Ja(k, m);
                        double want = ev.omega[size_t(a2)][i] * Jb(k, j) -
                                      ev.omega[size_t(a1)][i] * Jc(k, j);
                        acc.bump("kaehler_like", cov - want);
                    }
        }
    }
    acc.emit(rep, tol);
    return rep;
}

// ---------------------------------------------------------------------------
// Constant-type curvature
// ---------------------------------------------------------------------------

namespace {

/// The bracketed tensor of the constant-type form: R = (c/4) S.
Tensor4 constant_type_shape(const Eigen::MatrixXd& g,
                            const std::array<Eigen::MatrixXd, 3>& J) {
    const int d = static_cast<int>(g.rows());
    Tensor4 S(d, d, d, d);  // S(l,i,j,k), same layout as CurvatureAtPoint
    std::array<Eigen::MatrixXd, 3> gJ;
    for (int a = 0; a < 3; ++a) gJ[size_t(a)] = g * J[size_t(a)];
    for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    double v = g(j, k) * (l == i ? 1.0 : 0.0) -
                               g(i, k) * (l == j ? 1.0 : 0.0);
                    for (int a = 0; a < 3; ++a) {
                        const Eigen::MatrixXd& Ja = J[size_t(a)];
                        const Eigen::MatrixXd& gJa = gJ[size_t(a)];
                        v += gJa(k, j) * Ja(l, i) - gJa(k, i) * Ja(l, j);
                        v += (gJa(i, j) - gJa(j, i)) * Ja(l, k);
                    }
                    S(l, i, j, k) = v;
                }
    return S;
}

}  // namespace

ConstantTypeResult check_constant_type_curvature(
    const AmbientModel& model, const std::vector<Eigen::VectorXd>& pts,
    double tol, uint64_t seed) {
    if (!model.has_J)
        throw std::invalid_argument(
            "check_constant_type_curvature: model has no quaternionic "
            "structure");
    (void)tol;
    struct Snapshot {
        Tensor4 R, Rstar, S, Sstar;
    };
    std::vector<Snapshot> snaps;
    double num = 0, den = 0;
    for (const Eigen::VectorXd& x : pts) {
        AmbientEval ev = evaluate_ambient(model, x, /*strict=*/true);
        Snapshot s;
        s.R = ev.R.r;
        s.Rstar = ev.Rstar.r;
        s.S = constant_type_shape(ev.metric.g, ev.Jmat);
        s.Sstar = constant_type_shape(ev.metric.g, ev.Jstar);
        num += s.R.raw().dot(s.S.raw()) + s.Rstar.raw().dot(s.Sstar.raw());
        den += s.S.raw().squaredNorm() + s.Sstar.raw().squaredNorm();
        snaps.push_back(std::move(s));
    }
    ConstantTypeResult out;
    if (den < 1e-14) {
        out.degenerate = true;
        out.c_fit = 0.0;
    } else {
        out.c_fit = 4.0 * num / den;
    }
    auto max_gap = [&](double c) {
        double worst = 0;
        for (const Snapshot& s : snaps) {
            worst = std::max(worst, (s.R.raw() - (c / 4.0) * s.S.raw())
                                        .cwiseAbs()
                                        .maxCoeff());
            worst = std::max(worst, (s.Rstar.raw() - (c / 4.0) * s.Sstar.raw())
                                        .cwiseAbs()
                                        .maxCoeff());
        }
        return worst;
    };
    out.residual = max_gap(out.c_fit);
    if (model.c) out.declared_residual = max_gap(*model.c);

    // a few seeded vector triples, contracted, as an extra probe beyond the
    // component grid
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const int d = model.dim;
    for (const Snapshot& s : snaps) {
        for (int t = 0; t < 5; ++t) {
            Eigen::VectorXd X(d), Y(d), Z(d);
            for (int i = 0; i < d; ++i) {
                X[i] = nd(gen);
                Y[i] = nd(gen);
                Z[i] = nd(gen);
            }
            X.normalize(); Y.normalize(); Z.normalize();
            for (int l = 0; l < d; ++l) {
                double gap = 0;
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        for (int k = 0; k < d; ++k)
                            gap += (s.R(l, i, j, k) -
                                    (out.c_fit / 4.0) * s.S(l, i, j, k)) *
                                   X[i] * Y[j] * Z[k];
                out.residual = std::max(out.residual, std::abs(gap));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Built-in model spaces
// ---------------------------------------------------------------------------

namespace {

void init_zero_connection(AmbientModel& m) {
    m.mode = ConnectionMode::Skewness;
    m.skewness.assign(static_cast<size_t>(m.dim),
                      ExprMatrix::zeros(m.dim, m.dim, m.vars));
}

void set_constant(ExprMatrix& m, int i, int j, double v,
                  const std::vector<std::string>& vars) {
    m(i, j) = ExprAst::constant(v, vars);
}

}  // namespace

AmbientModel builtin_flat_quaternionic(int m) {
    if (m < 1)
        throw std::invalid_argument(
            "flat_quaternionic: m must be at least 1");
    AmbientModel model;
    model.name = "flat_quaternionic(" + std::to_string(m) + ")";
    model.dim = 4 * m;
    model.vars = chart_vars("x", model.dim);
    model.domain = DomainBox::cube(model.dim, -1.0, 1.0);
    model.metric = ExprMatrix::zeros(model.dim, model.dim, model.vars);
    for (int i = 0; i < model.dim; ++i)
        set_constant(model.metric, i, i, 1.0, model.vars);
    init_zero_connection(model);

    // Standard quaternion action, block-diagonal per H factor. Block basis
    // (1, i, j, k); J1/J2/J3 are left multiplication by i, j, k.
    model.has_J = true;
    for (int a = 0; a < 3; ++a)
        model.J[size_t(a)] =
            ExprMatrix::zeros(model.dim, model.dim, model.vars);
    auto put = [&](int alpha, int blk, int row, int col, double v) {
        set_constant(model.J[size_t(alpha)], 4 * blk + row, 4 * blk + col, v,
                     model.vars);
    };
    for (int blk = 0; blk < m; ++blk) {
        // J1: e1->e2, e2->-e1, e3->e4, e4->-e3
        put(0, blk, 1, 0, 1);  put(0, blk, 0, 1, -1);
        put(0, blk, 3, 2, 1);  put(0, blk, 2, 3, -1);
        // J2: e1->e3, e2->-e4, e3->-e1, e4->e2
        put(1, blk, 2, 0, 1);  put(1, blk, 3, 1, -1);
        put(1, blk, 0, 2, -1); put(1, blk, 1, 3, 1);
        // J3: e1->e4, e2->e3, e3->-e2, e4->-e1
        put(2, blk, 3, 0, 1);  put(2, blk, 2, 1, 1);
        put(2, blk, 1, 2, -1); put(2, blk, 0, 3, -1);
    }
    for (int a = 0; a < 3; ++a)
        model.omega[size_t(a)].assign(static_cast<size_t>(model.dim),
                                      ExprAst::constant(0.0, model.vars));
    model.c = 0.0;
    return model;
}

AmbientModel builtin_euclidean(int dim) {
    if (dim < 1) throw std::invalid_argument("euclidean: dim must be >= 1");
    AmbientModel model;
    model.name = "euclidean(" + std::to_string(dim) + ")";
    model.dim = dim;
    model.vars = chart_vars("x", dim);
    model.domain = DomainBox::cube(dim, -1.0, 1.0);
    model.metric = ExprMatrix::zeros(dim, dim, model.vars);
    for (int i = 0; i < dim; ++i)
        set_constant(model.metric, i, i, 1.0, model.vars);
    init_zero_connection(model);
    return model;
}

AmbientModel builtin_normal_family(double alpha) {
    AmbientModel model;
    model.name = "normal_family(" + fmt(alpha) + ")";
    model.dim = 2;
    model.vars = chart_vars("x", 2);  // x1 = mu, x2 = sigma
    DomainBox box;
    box.lo = Eigen::VectorXd(2);
    box.hi = Eigen::VectorXd(2);
    box.lo << -1.0, 0.6;
    box.hi << 1.0, 1.8;
    model.domain = box;
    model.metric = ExprMatrix::zeros(2, 2, model.vars);
    model.metric(0, 0) = ExprAst::parse("1/x2^2", model.vars);
    model.metric(1, 1) = ExprAst::parse("2/x2^2", model.vars);
    init_zero_connection(model);
    if (alpha != 0.0) {
        // cubic form K = -(alpha/2) T with T_mms = 2/s^3, T_sss = 8/s^3
        ExprAst k112 = ExprAst::parse(fmt(-alpha) + "/x2^3", model.vars);
        ExprAst k222 = ExprAst::parse(fmt(-4.0 * alpha) + "/x2^3", model.vars);
        model.skewness[0](0, 1) = k112;
        model.skewness[0](1, 0) = k112;
        model.skewness[1](0, 0) = k112;
        model.skewness[1](1, 1) = k222;
    }
    return model;
}

AmbientModel builtin_round_sphere(int n, double radius) {
    if (n < 1) throw std::invalid_argument("round_sphere: n must be >= 1");
    if (!(radius > 0))
        throw std::invalid_argument("round_sphere: radius must be positive");
    AmbientModel model;
    model.name = "round_sphere(" + std::to_string(n) + "," + fmt(radius) + ")";
    model.dim = n;
    model.vars = chart_vars("x", n);
    model.domain = DomainBox::cube(n, -0.8, 0.8);
    model.metric = ExprMatrix::zeros(n, n, model.vars);
    std::string r2 = fmt(radius * radius);
    std::string r4 = fmt(4.0 * radius * radius * radius * radius);
    std::string norm2 = "x1^2";
    for (int i = 2; i <= n; ++i) norm2 += "+x" + std::to_string(i) + "^2";
    std::string entry = r4 + "/(" + r2 + "+" + norm2 + ")^2";
    for (int i = 0; i < n; ++i)
        model.metric(i, i) = ExprAst::parse(entry, model.vars);
    init_zero_connection(model);
    return model;
}

AmbientModel builtin_hessian(const std::string& potential, int dim,
                             const DomainBox& domain) {
    if (domain.dim() != dim)
        throw std::invalid_argument("hessian: domain dimension mismatch");
    AmbientModel model;
    model.name = "hessian";
    model.dim = dim;
    model.vars = chart_vars("x", dim);
    model.domain = domain;
    ExprAst phi = ExprAst::parse(potential, model.vars);
    std::vector<ExprAst> dphi;
    for (int i = 0; i < dim; ++i) dphi.push_back(phi.derivative(i));
    model.metric = ExprMatrix::zeros(dim, dim, model.vars);
    std::vector<ExprMatrix> d2phi(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            ExprAst h = dphi[static_cast<size_t>(i)].derivative(j);
            model.metric(i, j) = h;
            model.metric(j, i) = h;
        }
    }
    // K_abc = -1/2 d^3 phi; the flat affine connection becomes nabla
    model.mode = ConnectionMode::Skewness;
    model.skewness.assign(static_cast<size_t>(dim),
                          ExprMatrix::zeros(dim, dim, model.vars));
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
            ExprAst dab = dphi[static_cast<size_t>(a)].derivative(b);
            for (int c = b; c < dim; ++c) {
                ExprAst third = dab.derivative(c);
                ExprBuilder eb(model.vars);
                int t = eb.import(third);
                int scaled = eb.mul(eb.number(-0.5), t);
                ExprAst k = std::move(eb).finish(scaled);
                int perms[6][3] = {{a, b, c}, {a, c, b}, {b, a, c},
                                   {b, c, a}, {c, a, b}, {c, b, a}};
                for (auto& p : perms)
                    model.skewness[static_cast<size_t>(p[0])](p[1], p[2]) = k;
            }
        }
    // convexity probe on a small seeded sample
    for (const Eigen::VectorXd& x : sample_points(model.domain, 10, 0xC4E2)) {
        Eigen::MatrixXd h(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                h(i, j) = model.metric(i, j).eval_value(x);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        if (es.eigenvalues().minCoeff() <= 1e-10)
            throw std::invalid_argument(
                "hessian: potential is not strictly convex on the domain "
                "(non-positive Hessian eigenvalue at a sampled point)");
    }
    return model;
}

}  // namespace chenverify
