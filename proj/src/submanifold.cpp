#include "chenverify/submanifold.hpp"

#include "chenverify/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace chenverify {

namespace {

using JetV = VecX<Jet2>;
using JetM = MatX<Jet2>;
using DualV = VecX<Dual>;

Jet2 full_jet(Jet2 j, int dim) {
    if (j.is_constant()) {
        j.grad = Eigen::VectorXd::Zero(dim);
        j.hess = Eigen::MatrixXd::Zero(dim, dim);
    }
    return j;
}

}  // namespace

const char* to_string(SubClass c) {
    switch (c) {
        case SubClass::Invariant: return "invariant";
        case SubClass::TotallyReal: return "totally_real";
        case SubClass::LagrangianLike: return "lagrangian_like";
        case SubClass::Generic: return "generic";
    }
    return "?";
}

ImmersedSubmanifold ImmersedSubmanifold::create(AmbientModel amb,
                                                SubmanifoldSpec spec) {
    if (static_cast<int>(spec.immersion.size()) != amb.dim)
        throw std::invalid_argument(
            "ImmersedSubmanifold: immersion has " +
            std::to_string(spec.immersion.size()) + " components, ambient " +
            std::to_string(amb.dim));
    if (spec.n < 1 || spec.n > amb.dim)
        throw std::invalid_argument("ImmersedSubmanifold: bad dimension n");
    ImmersedSubmanifold sub;
    sub.ambient = std::move(amb);
    sub.n = spec.n;
    sub.domain = spec.domain;
    sub.vars = spec.vars;
    sub.immersion = std::move(spec.immersion);
    sub.immersion_du.resize(sub.immersion.size());
    for (size_t k = 0; k < sub.immersion.size(); ++k) {
        sub.immersion_du[k].reserve(static_cast<size_t>(sub.n));
        for (int a = 0; a < sub.n; ++a)
            sub.immersion_du[k].push_back(sub.immersion[k].derivative(a));
    }
    return sub;
}

InducedData induced_data(const ImmersedSubmanifold& sub,
                         const Eigen::VectorXd& u) {
    const int n = sub.n;
    const int d = sub.ambient.dim;
    const int dn = d - n;
    if (u.size() != n)
        throw std::invalid_argument("induced_data: chart point dimension");

    InducedData out;
    out.n = n;
    out.d = d;
    out.chart_point = u;

    // ---- immersion values and derivative jets -----------------------------
    Eigen::VectorXd xval(d);
    for (int k = 0; k < d; ++k)
        xval[k] = sub.immersion[static_cast<size_t>(k)].eval_value(u);
    out.ambient_point = xval;

    // F(k,a) = d f^k/d u_a as a second-order jet in u (so its grad/hess carry
    // the second and third immersion derivatives)
    std::vector<std::vector<Jet2>> F(static_cast<size_t>(d));
    Eigen::MatrixXd jac(d, n);
    for (int k = 0; k < d; ++k) {
        F[static_cast<size_t>(k)].resize(static_cast<size_t>(n));
        for (int a = 0; a < n; ++a) {
            Jet2 j = full_jet(
                sub.immersion_du[static_cast<size_t>(k)][static_cast<size_t>(a)]
                    .eval_jet(u),
                n);
            jac(k, a) = j.value;
            F[static_cast<size_t>(k)][static_cast<size_t>(a)] = std::move(j);
        }
    }
    out.jacobian = jac;

    // ---- ambient symbols at the foot point --------------------------------
    AmbientEval amb = evaluate_ambient(sub.ambient, xval, /*strict=*/true);

    // rank condition measured in the ambient metric
    {
        Eigen::MatrixXd m = jac.transpose() * amb.metric.g * jac;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        double smin = std::sqrt(std::max(0.0, es.eigenvalues().minCoeff()));
        if (smin <= 1e-8) {
            std::ostringstream os;
            os << "induced_data: immersion rank-deficient at u = ("
               << u.transpose() << "), smallest singular value " << smin;
            throw std::runtime_error(os.str());
        }
    }

    // ---- ambient metric composed along the immersion, as jets in u --------
    std::vector<Jet2> xjet(static_cast<size_t>(d));
    for (int k = 0; k < d; ++k) {
        Jet2 j;
        j.value = xval[k];
        j.grad = jac.row(k).transpose();
        Eigen::MatrixXd h(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                h(a, b) = 0.5 * (F[size_t(k)][size_t(a)].grad[b] +
                                 F[size_t(k)][size_t(b)].grad[a]);
        j.hess = h;
        xjet[static_cast<size_t>(k)] = std::move(j);
    }
    JetM ghat(d, d);
    for (int k = 0; k < d; ++k)
        for (int l = k; l < d; ++l) {
            Jet2 e = full_jet(sub.ambient.metric(k, l).eval<Jet2>(xjet), n);
            ghat(k, l) = e;
            ghat(l, k) = e;
        }

    // ---- induced metric with two derivative orders ------------------------
    JetM gind(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            Jet2 acc(0.0);
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    acc += ghat(k, l) * F[size_t(k)][size_t(a)] *
                           F[size_t(l)][size_t(b)];
            acc = full_jet(acc, n);
            gind(a, b) = acc;
            gind(b, a) = acc;
        }
    Eigen::MatrixXd gI(n, n);
    Tensor3 dgI(n, n, n);
    Tensor4 d2gI(n, n, n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            gI(a, b) = gind(a, b).value;
            for (int c = 0; c < n; ++c) {
                dgI(c, a, b) = gind(a, b).grad[c];
                for (int e = 0; e < n; ++e)
                    d2gI(e, c, a, b) = gind(a, b).hess(e, c);
            }
        }
    out.induced_g = gI;
    MetricAtPoint induced_metric(gI, dgI);
    ConnectionAtPoint induced_lc = levi_civita(induced_metric, d2gI);
    CurvatureAtPoint induced_Rcirc = curvature(induced_lc);

    // ---- orthonormal tangent frame (chart components, jet-valued) ---------
    std::vector<JetV> basis;
    for (int a = 0; a < n; ++a) {
        JetV v = JetV::Constant(n, Jet2(0.0));
        v[a] = Jet2(1.0);
        basis.push_back(v);
    }
    std::vector<JetV> E = gram_schmidt_generic<Jet2>(gind, basis,
                                                     /*skip_dependent=*/false);
    Eigen::MatrixXd Ech(n, n);  // Ech(a,i): e_i = sum_a Ech(a,i) d/du_a
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a)
            Ech(a, i) = E[size_t(i)][a].value;
    out.tangent_chart = Ech;

    // tangent frame in ambient components
    std::vector<JetV> T(static_cast<size_t>(n));
    Eigen::MatrixXd Tval(d, n);
    for (int i = 0; i < n; ++i) {
        JetV t = JetV::Constant(d, Jet2(0.0));
        for (int k = 0; k < d; ++k) {
            Jet2 acc(0.0);
            for (int a = 0; a < n; ++a)
                acc += F[size_t(k)][size_t(a)] * E[size_t(i)][a];
            t[k] = full_jet(acc, n);
            Tval(k, i) = t[k].value;
        }
        T[size_t(i)] = std::move(t);
    }
    out.tangent_ambient = Tval;

    // ---- normal frame: ambient basis projected off the tangent space ------
    std::vector<JetV> Xi;
    for (int k = 0; k < d && static_cast<int>(Xi.size()) < dn; ++k) {
        JetV v = JetV::Constant(d, Jet2(0.0));
        v[k] = Jet2(1.0);
        for (const JetV& t : T) {
            Jet2 proj = metric_dot<Jet2>(ghat, v, t);
            for (int r = 0; r < d; ++r) v[r] = v[r] - proj * t[r];
        }
        for (const JetV& xi : Xi) {
            Jet2 proj = metric_dot<Jet2>(ghat, v, xi);
            for (int r = 0; r < d; ++r) v[r] = v[r] - proj * xi[r];
        }
        Jet2 nrm2 = metric_dot<Jet2>(ghat, v, v);
        if (nrm2.value < 1e-12) continue;  // near-dependent, skip
        Jet2 nrm = sqrt(nrm2);
        for (int r = 0; r < d; ++r) v[r] = full_jet(v[r] / nrm, n);
        Xi.push_back(std::move(v));
    }
    if (static_cast<int>(Xi.size()) != dn)
        throw std::runtime_error(
            "induced_data: could not complete the normal frame");
    Eigen::MatrixXd Xival(d, std::max(dn, 0));
    for (int g = 0; g < dn; ++g)
        for (int k = 0; k < d; ++k) Xival(k, g) = Xi[size_t(g)][k].value;
    out.normal_ambient = Xival;

    // ---- first-order (dual) level ------------------------------------------
    auto compose3 = [&](const Tensor3& val, const Tensor4& dval) {
        Tensor3T<Dual> outT(d, d, d);
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    Dual e(val(k, i, j));
                    e.grad = Eigen::VectorXd::Zero(n);
                    for (int a = 0; a < n; ++a) {
                        double acc = 0;
                        for (int l = 0; l < d; ++l)
                            acc += dval(l, k, i, j) * jac(l, a);
                        e.grad[a] = acc;
                    }
                    outT(k, i, j) = std::move(e);
                }
        return outT;
    };
    Tensor3T<Dual> Ghat = compose3(amb.nabla.gamma, amb.nabla.dgamma);
    Tensor3T<Dual> GhatS =
        compose3(amb.nabla_star.gamma, amb.nabla_star.dgamma);

    MatX<Dual> ghat_dual(d, d);
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) ghat_dual(k, l) = to_dual(ghat(k, l));
    std::vector<DualV> Fd(static_cast<size_t>(d));
    for (int k = 0; k < d; ++k) {
        DualV col(n);
        for (int a = 0; a < n; ++a)
            col[a] = to_dual(F[size_t(k)][size_t(a)]);
        Fd[size_t(k)] = std::move(col);
    }
    std::vector<DualV> Xid(static_cast<size_t>(dn));
    for (int g = 0; g < dn; ++g) {
        DualV col(d);
        for (int k = 0; k < d; ++k) col[k] = to_dual(Xi[size_t(g)][k]);
        Xid[size_t(g)] = std::move(col);
    }

    // ambient covariant derivatives of the coordinate fields:
    // D(k;a,b) = d2 f^k_ab + Ghat^k_im f^i_a f^j_b  (dual-valued)
    Tensor3T<Dual> D(d, n, n), Dstar(d, n, n);
    for (int k = 0; k < d; ++k)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                Dual second = partial(F[size_t(k)][size_t(a)], b);
                Dual acc = second, accs = second;
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) {
                        Dual ff = Fd[size_t(i)][a] * Fd[size_t(j)][b];
                        acc += Ghat(k, i, j) * ff;
                        accs += GhatS(k, i, j) * ff;
                    }
                D(k, a, b) = acc;
                Dstar(k, a, b) = accs;
            }

    // induced connections: tangential parts solved against the induced metric
    MatX<Dual> gind_dual(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) gind_dual(a, b) = to_dual(gind(a, b));
    MatX<Dual> gind_inv = invert_matrix<Dual>(gind_dual);

    ConnectionAtPoint ind_conn, ind_conn_star;
    ind_conn.gamma = Tensor3(n, n, n);
    ind_conn.dgamma = Tensor4(n, n, n, n);
    ind_conn_star.gamma = Tensor3(n, n, n);
    ind_conn_star.dgamma = Tensor4(n, n, n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            DualV rhs(n), rhss(n);
            for (int c = 0; c < n; ++c) {
                Dual acc(0.0), accs(0.0);
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l) {
                        Dual fl = ghat_dual(k, l) * Fd[size_t(l)][c];
                        acc += fl * D(k, a, b);
                        accs += fl * Dstar(k, a, b);
                    }
                rhs[c] = acc;
                rhss[c] = accs;
            }
            for (int c = 0; c < n; ++c) {
                Dual gam(0.0), gams(0.0);
                for (int e = 0; e < n; ++e) {
                    gam += gind_inv(c, e) * rhs[e];
                    gams += gind_inv(c, e) * rhss[e];
                }
                ind_conn.gamma(c, a, b) = gam.value;
                ind_conn_star.gamma(c, a, b) = gams.value;
                for (int e = 0; e < n; ++e) {
                    ind_conn.dgamma(e, c, a, b) =
                        gam.is_constant() ? 0.0 : gam.grad[e];
                    ind_conn_star.dgamma(e, c, a, b) =
                        gams.is_constant() ? 0.0 : gams.grad[e];
                }
            }
        }
    CurvatureAtPoint induced_R = curvature(ind_conn);
    CurvatureAtPoint induced_Rstar = curvature(ind_conn_star);

    // ---- second fundamental forms ------------------------------------------
    out.sigma_chart = Tensor3(dn, n, n);
    out.sigma_star_chart = Tensor3(dn, n, n);
    for (int g = 0; g < dn; ++g)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double acc = 0, accs = 0;
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l) {
                        double w = amb.metric.g(k, l) * Xival(l, g);
                        acc += w * D(k, a, b).value;
                        accs += w * Dstar(k, a, b).value;
                    }
                out.sigma_chart(g, a, b) = acc;
                out.sigma_star_chart(g, a, b) = accs;
            }
    out.sigma = Tensor3(dn, n, n);
    out.sigma_star = Tensor3(dn, n, n);
    for (int g = 0; g < dn; ++g)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0, accs = 0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        double w = Ech(a, i) * Ech(b, j);
                        acc += w * out.sigma_chart(g, a, b);
                        accs += w * out.sigma_star_chart(g, a, b);
                    }
                out.sigma(g, i, j) = acc;
                out.sigma_star(g, i, j) = accs;
            }

    // ---- Weingarten: shape operators and normal connections ----------------
    // Wn(g;a,k) = (nabla-hat_a xi_g)^k, dual-valued
    Tensor3T<Dual> Wn(dn, n, d), WnS(dn, n, d);
    for (int g = 0; g < dn; ++g)
        for (int a = 0; a < n; ++a)
            for (int k = 0; k < d; ++k) {
                Dual acc = partial(Xi[size_t(g)][k], a);
                Dual accs = acc;
                for (int i = 0; i < d; ++i)
                    for (int m = 0; m < d; ++m) {
                        Dual fm = Fd[size_t(i)][a] * Xid[size_t(g)][m];
                        acc += Ghat(k, i, m) * fm;
                        accs += GhatS(k, i, m) * fm;
                    }
                Wn(g, a, k) = acc;
                WnS(g, a, k) = accs;
            }

    out.A.assign(static_cast<size_t>(dn), Eigen::MatrixXd::Zero(n, n));
    out.Astar.assign(static_cast<size_t>(dn), Eigen::MatrixXd::Zero(n, n));
    for (int g = 0; g < dn; ++g)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0, accs = 0;
                for (int a = 0; a < n; ++a) {
                    double w = 0, ws = 0;
                    for (int k = 0; k < d; ++k)
                        for (int l = 0; l < d; ++l) {
                            double gl = amb.metric.g(k, l) * Tval(l, j);
                            w += gl * Wn(g, a, k).value;
                            ws += gl * WnS(g, a, k).value;
                        }
                    acc += Ech(a, i) * w;
                    accs += Ech(a, i) * ws;
                }
                out.A[size_t(g)](i, j) = -acc;
                out.Astar[size_t(g)](i, j) = -accs;
            }

    // normal connection coefficients and their curvature
    Tensor3T<Dual> Gperp(n, dn, dn), GperpS(n, dn, dn);
    for (int a = 0; a < n; ++a)
        for (int g = 0; g < dn; ++g)
            for (int h = 0; h < dn; ++h) {
                Dual acc(0.0), accs(0.0);
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l) {
                        Dual w = ghat_dual(k, l) * Xid[size_t(h)][l];
                        acc += w * Wn(g, a, k);
                        accs += w * WnS(g, a, k);
                    }
                Gperp(a, g, h) = acc;
                GperpS(a, g, h) = accs;
            }
    auto perp_curvature = [&](const Tensor3T<Dual>& gp) {
        Tensor4 r(n, n, dn, dn);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int g = 0; g < dn; ++g)
                    for (int h = 0; h < dn; ++h) {
                        const Dual& gb = gp(b, g, h);
                        const Dual& ga = gp(a, g, h);
                        double acc = (gb.is_constant() ? 0.0 : gb.grad[a]) -
                                     (ga.is_constant() ? 0.0 : ga.grad[b]);
                        for (int mu = 0; mu < dn; ++mu)
                            acc += gp(a, mu, h).value * gp(b, g, mu).value -
                                   gp(b, mu, h).value * gp(a, g, mu).value;
                        r(a, b, g, h) = acc;
                    }
        return r;
    };
    Tensor4 rperp_chart = perp_curvature(Gperp);
    Tensor4 rperp_star_chart = perp_curvature(GperpS);
    out.Rperp = Tensor4(n, n, dn, dn);
    out.Rstar_perp = Tensor4(n, n, dn, dn);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int g = 0; g < dn; ++g)
                for (int h = 0; h < dn; ++h) {
                    double acc = 0, accs = 0;
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b) {
                            double w = Ech(a, i) * Ech(b, j);
                            acc += w * rperp_chart(a, b, g, h);
                            accs += w * rperp_star_chart(a, b, g, h);
                        }
                    out.Rperp(i, j, g, h) = acc;
                    out.Rstar_perp(i, j, g, h) = accs;
                }

    // ---- mean curvature -----------------------------------------------------
    out.H_coeff = Eigen::VectorXd::Zero(std::max(dn, 0));
    out.Hstar_coeff = Eigen::VectorXd::Zero(std::max(dn, 0));
    for (int g = 0; g < dn; ++g) {
        double acc = 0, accs = 0;
        for (int i = 0; i < n; ++i) {
            acc += out.sigma(g, i, i);
            accs += out.sigma_star(g, i, i);
        }
        out.H_coeff[g] = acc / n;
        out.Hstar_coeff[g] = accs / n;
    }
    out.H_ambient = Xival * out.H_coeff;
    out.Hstar_ambient = Xival * out.Hstar_coeff;
    out.H_norm2 = out.H_coeff.squaredNorm();
    out.Hstar_norm2 = out.Hstar_coeff.squaredNorm();

    // ---- curvature tensors lowered into the frames --------------------------
    out.R_frame = contract_all4(induced_R.lowered(induced_metric), Ech, Ech, Ech,
                            Ech);
    out.Rstar_frame =
        contract_all4(induced_Rstar.lowered(induced_metric), Ech, Ech, Ech, Ech);
    out.Rcirc_frame =
        contract_all4(induced_Rcirc.lowered(induced_metric), Ech, Ech, Ech, Ech);

    Tensor4 ambR_low = amb.R.lowered(amb.metric);
    Tensor4 ambRstar_low = amb.Rstar.lowered(amb.metric);
    Tensor4 ambRcirc_low = amb.Rcirc.lowered(amb.metric);
    out.ambR_frame = contract_all4(ambR_low, Tval, Tval, Tval, Tval);
    out.ambRstar_frame = contract_all4(ambRstar_low, Tval, Tval, Tval, Tval);
    out.ambRcirc_frame = contract_all4(ambRcirc_low, Tval, Tval, Tval, Tval);
    if (dn > 0) {
        out.ambR_mixed = contract_all4(ambR_low, Tval, Tval, Xival, Xival);
        out.ambRstar_mixed = contract_all4(ambRstar_low, Tval, Tval, Xival, Xival);
    }

    // ---- quaternionic tangential operators and alignment --------------------
    out.has_J = amb.has_J;
    if (amb.has_J) {
        Eigen::MatrixXd N(std::max(dn, 1), 3 * n);
        N.setZero();
        double max_tan = 0, max_nor = 0;
        for (int al = 0; al < 3; ++al) {
            const Eigen::MatrixXd& Jm = amb.Jmat[size_t(al)];
            Eigen::MatrixXd Js = amb.Jstar[size_t(al)];
            // pairing p(i,j) = ghat(J e_i, e_j)
            out.P[size_t(al)] =
                (Jm * Tval).transpose() * amb.metric.g * Tval;
            out.Pstar[size_t(al)] =
                (Js * Tval).transpose() * amb.metric.g * Tval;
            for (int i = 0; i < n; ++i) {
                Eigen::VectorXd w = Jm * Tval.col(i);
                Eigen::VectorXd tcoef = Tval.transpose() * amb.metric.g * w;
                out.alignment.tangent_alignment[size_t(al)] = std::max(
                    out.alignment.tangent_alignment[size_t(al)], tcoef.norm());
                max_tan = std::max(max_tan, tcoef.norm());
                if (dn > 0) {
                    Eigen::VectorXd ncoef =
                        Xival.transpose() * amb.metric.g * w;
                    out.alignment.normal_alignment[size_t(al)] =
                        std::max(out.alignment.normal_alignment[size_t(al)],
                                 ncoef.norm());
                    max_nor = std::max(max_nor, ncoef.norm());
                    N.col(al * n + i) = ncoef;
                }
            }
        }
        out.alignment.max_tangent_alignment = max_tan;
        out.alignment.max_normal_alignment = max_nor;
        if (dn > 0) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(N);
            const auto& sv = svd.singularValues();
            out.alignment.normal_span_gap =
                sv.size() >= dn ? sv[dn - 1] : 0.0;
        }
    }

    return out;
}

std::array<PAlphaInvariants, 3> p_alpha_invariants(const InducedData& data) {
    if (!data.has_J)
        throw std::invalid_argument(
            "p_alpha_invariants: ambient carries no quaternionic structure");
    std::array<PAlphaInvariants, 3> out;
    for (int al = 0; al < 3; ++al) {
        // operator matrix: columns are images, i.e. op = pairing^T
        Eigen::MatrixXd P = data.P[size_t(al)].transpose();
        Eigen::MatrixXd Ps = data.Pstar[size_t(al)].transpose();
        out[size_t(al)].tr_P = P.trace();
        out[size_t(al)].norm2_P = P.squaredNorm();
        out[size_t(al)].tr_PPstar = (P * Ps).trace();
    }
    return out;
}

SubClass classify_at(const InducedData& data, double tol) {
    if (!data.has_J)
        throw std::invalid_argument(
            "classify_at: ambient carries no quaternionic structure");
    const ClassificationDiag& al = data.alignment;
    if (al.max_normal_alignment < tol) return SubClass::Invariant;
    if (al.max_tangent_alignment < tol) {
        if (al.normal_span_gap > tol) return SubClass::LagrangianLike;
        return SubClass::TotallyReal;
    }
    return SubClass::Generic;
}

SubClass classify(const ImmersedSubmanifold& sub,
                  const std::vector<Eigen::VectorXd>& pts, double tol) {
    if (!sub.ambient.has_J)
        throw std::invalid_argument(
            "classify: ambient carries no quaternionic structure");
    double max_tan = 0, max_nor = 0, min_gap =
        std::numeric_limits<double>::infinity();
    for (const Eigen::VectorXd& u : pts) {
        InducedData data = induced_data(sub, u);
        max_tan = std::max(max_tan, data.alignment.max_tangent_alignment);
        max_nor = std::max(max_nor, data.alignment.max_normal_alignment);
        min_gap = std::min(min_gap, data.alignment.normal_span_gap);
    }
    if (max_nor < tol) return SubClass::Invariant;
    if (max_tan < tol)
        return min_gap > tol ? SubClass::LagrangianLike : SubClass::TotallyReal;
    return SubClass::Generic;
}

namespace {

double contract4(const Tensor4& t, const Eigen::VectorXd& a,
                 const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                 const Eigen::VectorXd& e) {
    double acc = 0;
    for (Eigen::Index i = 0; i < t.dim0(); ++i)
        for (Eigen::Index j = 0; j < t.dim1(); ++j) {
            double ab = a[i] * b[j];
            if (ab == 0.0) continue;
            for (Eigen::Index k = 0; k < t.dim2(); ++k)
                for (Eigen::Index l = 0; l < t.dim3(); ++l)
                    acc += t(i, j, k, l) * ab * c[k] * e[l];
        }
    return acc;
}

Eigen::MatrixXd sigma_pair(const Tensor3& s, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y) {
    // returns per-gamma coefficients of sigma(x, y)
    Eigen::MatrixXd out(s.dim0(), 1);
    for (Eigen::Index g = 0; g < s.dim0(); ++g) {
        double acc = 0;
        for (Eigen::Index i = 0; i < s.dim1(); ++i)
            for (Eigen::Index j = 0; j < s.dim2(); ++j)
                acc += s(g, i, j) * x[i] * y[j];
        out(g, 0) = acc;
    }
    return out;
}

}  // namespace

GaussRicciResiduals gauss_ricci_residuals(const InducedData& data, int trials,
                                          uint64_t seed) {
    const int n = data.n;
    const int dn = data.d - data.n;
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    auto unit = [&](int dim) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v[i] = nd(gen);
        double nrm = v.norm();
        if (nrm < 1e-12) v[0] = 1.0, nrm = 1.0;
        return Eigen::VectorXd(v / nrm);
    };

    GaussRicciResiduals out;
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd X = unit(n), Y = unit(n), Z = unit(n), W = unit(n);
        // both Gauss equations
        double lhs = contract4(data.ambR_frame, X, Y, Z, W);
        double rhs = contract4(data.R_frame, X, Y, Z, W) +
                     sigma_pair(data.sigma, X, Z)
                         .col(0)
                         .dot(sigma_pair(data.sigma_star, Y, W).col(0)) -
                     sigma_pair(data.sigma_star, X, W)
                         .col(0)
                         .dot(sigma_pair(data.sigma, Y, Z).col(0));
        out.gauss = std::max(out.gauss, std::abs(lhs - rhs));

        double lhss = contract4(data.ambRstar_frame, X, Y, Z, W);
        double rhss = contract4(data.Rstar_frame, X, Y, Z, W) +
                      sigma_pair(data.sigma_star, X, Z)
                          .col(0)
                          .dot(sigma_pair(data.sigma, Y, W).col(0)) -
                      sigma_pair(data.sigma, X, W)
                          .col(0)
                          .dot(sigma_pair(data.sigma_star, Y, Z).col(0));
        out.gauss_star = std::max(out.gauss_star, std::abs(lhss - rhss));

        if (dn > 0) {
            Eigen::VectorXd xi = unit(dn), eta = unit(dn);
            // operator matrices for the shape-operator combinations
            Eigen::MatrixXd Axi = Eigen::MatrixXd::Zero(n, n);
            Eigen::MatrixXd Aeta = Eigen::MatrixXd::Zero(n, n);
            Eigen::MatrixXd Asxi = Eigen::MatrixXd::Zero(n, n);
            Eigen::MatrixXd Aseta = Eigen::MatrixXd::Zero(n, n);
            for (int g = 0; g < dn; ++g) {
                Axi += xi[g] * data.A[size_t(g)].transpose();
                Aeta += eta[g] * data.A[size_t(g)].transpose();
                Asxi += xi[g] * data.Astar[size_t(g)].transpose();
                Aseta += eta[g] * data.Astar[size_t(g)].transpose();
            }
            // Expanding the Weingarten formulas against the sigma/A pairing
            // relations puts [A_xi, A*_eta] in the unstarred normal-bundle
            // equation and [A*_xi, A_eta] in the starred one; the two shape
            // operators are g-self-adjoint, which the reduction uses.
            double perp = contract4(data.Rperp, X, Y, xi, eta);
            double ambm = contract4(data.ambR_mixed, X, Y, xi, eta);
            double bracket = Y.dot((Axi * Aseta - Aseta * Axi) * X);
            out.ricci = std::max(out.ricci,
                                 std::abs(perp - (ambm + bracket)));

            double perps = contract4(data.Rstar_perp, X, Y, xi, eta);
            double ambms = contract4(data.ambRstar_mixed, X, Y, xi, eta);
            double brackets = Y.dot((Asxi * Aeta - Aeta * Asxi) * X);
            out.ricci_star = std::max(out.ricci_star,
                                      std::abs(perps - (ambms + brackets)));
        }
    }
    return out;
}

GaussRicciResiduals gauss_ricci_residuals(const ImmersedSubmanifold& sub,
                                          const Eigen::VectorXd& u, int trials,
                                          uint64_t seed) {
    InducedData data = induced_data(sub, u);
    return gauss_ricci_residuals(data, trials, seed);
}

}  // namespace chenverify
