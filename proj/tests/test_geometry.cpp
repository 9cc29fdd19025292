#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chenverify/geometry.hpp"
#include "chenverify/jets.hpp"
#include "testutil.hpp"

#include <cmath>
#include <functional>

using namespace chenverify;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

using EntryFn = std::function<Jet2(const std::vector<Jet2>&, int, int)>;

// Builds metric data (value, first, second derivatives) from jet-evaluated
// entries; the independent hand-coded oracle path for geometry tests.
std::pair<MetricAtPoint, Tensor4> metric_from(int d, const EntryFn& fn,
                                              const VectorXd& x) {
    auto seeds = jet2_seed_all(x);
    MatrixXd g(d, d);
    Tensor3 dg(d, d, d);
    Tensor4 d2g(d, d, d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Jet2 e = fn(seeds, i, j);
            g(i, j) = e.value;
            for (int k = 0; k < d; ++k) {
                dg(k, i, j) = e.is_constant() ? 0.0 : e.grad[k];
                for (int m = 0; m < d; ++m)
                    d2g(m, k, i, j) = e.is_constant() ? 0.0 : e.hess(m, k);
            }
        }
    return {MetricAtPoint(g, dg), d2g};
}

EntryFn euclidean_entries() {
    return [](const std::vector<Jet2>&, int i, int j) {
        return Jet2(i == j ? 1.0 : 0.0);
    };
}

// Fisher metric of the (mu, sigma) normal family: diag(1/s^2, 2/s^2).
EntryFn fisher_normal_entries() {
    return [](const std::vector<Jet2>& xs, int i, int j) {
        if (i != j) return Jet2(0.0);
        Jet2 s2 = xs[1] * xs[1];
        return (i == 0 ? Jet2(1.0) : Jet2(2.0)) / s2;
    };
}

// Conformal metric lambda(x) * delta_ij.
EntryFn conformal_entries(const std::function<Jet2(const std::vector<Jet2>&)>&
                              lambda) {
    return [lambda](const std::vector<Jet2>& xs, int i, int j) {
        if (i != j) return Jet2(0.0);
        return lambda(xs);
    };
}

Jet2 norm2(const std::vector<Jet2>& xs) {
    Jet2 acc(0.0);
    for (const Jet2& x : xs) acc += x * x;
    return acc;
}

}  // namespace

TEST_CASE("Levi-Civita of a constant metric vanishes") {
    VectorXd x = VectorXd::Zero(3);
    auto [m, d2g] = metric_from(3, euclidean_entries(), x);
    ConnectionAtPoint c = levi_civita(m, d2g);
    CHECK(max_abs(c.gamma) == 0.0);
    CHECK(max_abs(c.dgamma) == 0.0);
    CurvatureAtPoint R = curvature(c);
    CHECK(max_abs(R.r) == 0.0);
}

TEST_CASE("Fisher normal-family Christoffels match the closed form") {
    VectorXd x(2);
    x << 0.7, 1.3;
    double s = x[1];
    auto [m, d2g] = metric_from(2, fisher_normal_entries(), x);
    ConnectionAtPoint c = levi_civita(m, d2g);
    CHECK(c.gamma(0, 0, 1) == doctest::Approx(-1.0 / s).epsilon(1e-12));
    CHECK(c.gamma(0, 1, 0) == doctest::Approx(-1.0 / s).epsilon(1e-12));
    CHECK(c.gamma(1, 0, 0) == doctest::Approx(1.0 / (2 * s)).epsilon(1e-12));
    CHECK(c.gamma(1, 1, 1) == doctest::Approx(-1.0 / s).epsilon(1e-12));
    CHECK(c.gamma(0, 0, 0) == doctest::Approx(0.0));
    CHECK(c.gamma(1, 0, 1) == doctest::Approx(0.0));

    // dgamma against central differences of gamma
    double h = 1e-5;
    for (int dir = 0; dir < 2; ++dir) {
        VectorXd xp = x, xm = x;
        xp[dir] += h;
        xm[dir] -= h;
        auto [mp, d2p] = metric_from(2, fisher_normal_entries(), xp);
        auto [mm2, d2m] = metric_from(2, fisher_normal_entries(), xm);
        ConnectionAtPoint cp = levi_civita(mp), cm = levi_civita(mm2);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double fd =
                        (cp.gamma(k, i, j) - cm.gamma(k, i, j)) / (2 * h);
                    CHECK(c.dgamma(dir, k, i, j) ==
                          doctest::Approx(fd).epsilon(1e-6));
                }
    }
}

TEST_CASE("conformal metric Christoffels match the conformal-factor oracle") {
    // g = delta / (1+|x|^2)^2, i.e. phi = -log(1+|x|^2)
    auto lambda = [](const std::vector<Jet2>& xs) {
        Jet2 w = Jet2(1.0) + norm2(xs);
        return Jet2(1.0) / (w * w);
    };
    cvtest::Rng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        VectorXd x = rng.uniform_vec(3, -0.8, 0.8);
        auto [m, d2g] = metric_from(3, conformal_entries(lambda), x);
        ConnectionAtPoint c = levi_civita(m, d2g);
        double w = 1.0 + x.squaredNorm();
        VectorXd dphi = -2.0 * x / w;
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    double expect = (k == i ? dphi[j] : 0.0) +
                                    (k == j ? dphi[i] : 0.0) -
                                    (i == j ? dphi[k] : 0.0);
                    CHECK(c.gamma(k, i, j) ==
                          doctest::Approx(expect).epsilon(1e-10));
                }
    }
}

TEST_CASE("round unit sphere has sectional curvature one") {
    auto lambda = [](const std::vector<Jet2>& xs) {
        Jet2 w = Jet2(1.0) + norm2(xs);
        return Jet2(4.0) / (w * w);
    };
    cvtest::Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        VectorXd x = rng.uniform_vec(2, -1.2, 1.2);
        auto [m, d2g] = metric_from(2, conformal_entries(lambda), x);
        ConnectionAtPoint c = levi_civita(m, d2g);
        CurvatureAtPoint R = curvature(c);
        Frame f = gram_schmidt(m, {rng.gauss_vec(2), rng.gauss_vec(2)});
        Plane pl{f.vectors[0], f.vectors[1]};
        double sec = curvature_pairing(m, R, pl.x, pl.y, pl.y, pl.x);
        CHECK(sec == doctest::Approx(1.0).epsilon(1e-9));
        // first Bianchi identity for the Levi-Civita curvature
        double worst = 0;
        for (int l = 0; l < 2; ++l)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    for (int k = 0; k < 2; ++k)
                        worst = std::max(worst,
                                         std::abs(R.r(l, i, j, k) +
                                                  R.r(l, j, k, i) +
                                                  R.r(l, k, i, j)));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("dual connection: Levi-Civita is self-dual") {
    VectorXd x(2);
    x << 0.4, 1.1;
    auto [m, d2g] = metric_from(2, fisher_normal_entries(), x);
    ConnectionAtPoint lc = levi_civita(m, d2g);
    ConnectionAtPoint dual = dual_connection(m, lc, d2g);
    CHECK((lc.gamma.raw() - dual.gamma.raw()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((lc.dgamma.raw() - dual.dgamma.raw()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("dual connection on a flat metric negates a totally symmetric "
          "contracted cubic form") {
    const int d = 3;
    VectorXd x = VectorXd::Zero(d);
    auto [m, d2g] = metric_from(d, euclidean_entries(), x);
    // constant totally symmetric K^k_ij (flat metric: indices raise freely)
    cvtest::Rng rng(23);
    Tensor3 K(d, d, d);
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b)
            for (int c = b; c < d; ++c) {
                double v = rng.uniform(-1, 1);
                K(a, b, c) = K(a, c, b) = K(b, a, c) = v;
                K(b, c, a) = K(c, a, b) = K(c, b, a) = v;
            }
    ConnectionAtPoint conn;
    conn.gamma = K;
    ConnectionAtPoint dual = dual_connection(m, conn);
    CHECK((dual.gamma.raw() + K.raw()).cwiseAbs().maxCoeff() < 1e-14);

    // duality identity holds: d_i g_jk = G^m_ij g_mk + G*^m_ik g_jm
    double worst = 0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                double rhs = 0;
                for (int mm = 0; mm < d; ++mm)
                    rhs += conn.gamma(mm, i, j) * m.g(mm, k) +
                           dual.gamma(mm, i, k) * m.g(j, mm);
                worst = std::max(worst, std::abs(m.dg(i, j, k) - rhs));
            }
    CHECK(worst < 1e-13);
}

TEST_CASE("sectional K-curvature conventions and invariances") {
    // self-dual case: R = R* = LC, so the proof-weight bracket cancels
    auto lambda = [](const std::vector<Jet2>& xs) {
        Jet2 w = Jet2(1.0) + norm2(xs);
        return Jet2(4.0) / (w * w);
    };
    VectorXd x(2);
    x << 0.3, -0.5;
    auto [m, d2g] = metric_from(2, conformal_entries(lambda), x);
    ConnectionAtPoint c = levi_civita(m, d2g);
    CurvatureAtPoint R = curvature(c);
    Frame f = gram_schmidt(m, {VectorXd::Unit(2, 0), VectorXd::Unit(2, 1)});
    Plane pl{f.vectors[0], f.vectors[1]};
    CHECK(sectional_K(m, R, R, R, pl) == doctest::Approx(0.0));
    // the section-display variant keeps half the Riemannian value
    CHECK(sectional_K(m, R, R, R, pl, KConvention::SectionWeight) ==
          doctest::Approx(0.5 * curvature_pairing(m, R, pl.x, pl.y, pl.y,
                                                  pl.x)));
    CHECK(scalar_tau(m, R, R, R, f) == doctest::Approx(0.0));

    // synthetic: LC curvature = 0, both dual pairings equal a => K = a
    const int d2 = 2;
    MatrixXd id = MatrixXd::Identity(d2, d2);
    MetricAtPoint me(id, Tensor3(d2, d2, d2));
    CurvatureAtPoint Ra, Rz;
    Ra.r = Tensor4(d2, d2, d2, d2);
    Rz.r = Tensor4(d2, d2, d2, d2);
    double a = 0.37;
    // constant-curvature form: R^l_ijk = a (d_il d_jk - d_ik d_jl); this has
    // the pairing antisymmetries the duality identity guarantees, so it is a
    // legitimate stand-in for a statistical (R, R*) pair with R* = R
    for (int l = 0; l < d2; ++l)
        for (int i = 0; i < d2; ++i)
            for (int j = 0; j < d2; ++j)
                for (int k = 0; k < d2; ++k)
                    Ra.r(l, i, j, k) = a * ((l == i && j == k ? 1.0 : 0.0) -
                                            (i == k && l == j ? 1.0 : 0.0));
    Plane ple{VectorXd::Unit(2, 0), VectorXd::Unit(2, 1)};
    CHECK(sectional_K(me, Ra, Ra, Rz, ple) == doctest::Approx(a));
    CHECK(scalar_tau(me, Ra, Ra, Rz,
                     Frame{{VectorXd::Unit(2, 0), VectorXd::Unit(2, 1)},
                           FrameKind::Tangent}) == doctest::Approx(a));

    // rotation invariance inside the plane
    cvtest::Rng rng(31);
    for (int t = 0; t < 20; ++t) {
        double th = rng.uniform(0, 2 * M_PI);
        Plane rot{std::cos(th) * ple.x + std::sin(th) * ple.y,
                  -std::sin(th) * ple.x + std::cos(th) * ple.y};
        CHECK(sectional_K(me, Ra, Ra, Rz, rot) ==
              doctest::Approx(a).epsilon(1e-10));
    }

    // non-orthonormal plane rejected
    Plane bad{2.0 * ple.x, ple.y};
    CHECK_THROWS_AS(sectional_K(me, Ra, Ra, Rz, bad), std::invalid_argument);
}

TEST_CASE("gram_schmidt") {
    MatrixXd id = MatrixXd::Identity(2, 2);
    MetricAtPoint me(id, Tensor3(2, 2, 2));
    VectorXd v1(2), v2(2);
    v1 << 1, 0;
    v2 << 1, 1;
    Frame f = gram_schmidt(me, {v1, v2});
    CHECK((f.vectors[0] - v1).norm() < 1e-14);
    VectorXd e2(2);
    e2 << 0, 1;
    CHECK((f.vectors[1] - e2).norm() < 1e-14);

    MatrixXd g4 = MatrixXd::Identity(2, 2);
    g4(0, 0) = 4.0;
    MetricAtPoint m4(g4, Tensor3(2, 2, 2));
    Frame f4 = gram_schmidt(m4, {v1});
    CHECK(f4.vectors[0][0] == doctest::Approx(0.5));
    CHECK(f4.vectors[0][1] == doctest::Approx(0.0));

    // random 5-vector set: output Gram matrix is the identity
    cvtest::Rng rng(47);
    MatrixXd a = MatrixXd::NullaryExpr(5, 5, [&](Eigen::Index, Eigen::Index) {
        return rng.gauss();
    });
    MatrixXd spd = a * a.transpose() + 5.0 * MatrixXd::Identity(5, 5);
    MetricAtPoint m5(spd, Tensor3(5, 5, 5));
    std::vector<VectorXd> vecs;
    for (int i = 0; i < 5; ++i) vecs.push_back(rng.gauss_vec(5));
    Frame f5 = gram_schmidt(m5, vecs);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            double dot = f5.vectors[i].dot(spd * f5.vectors[j]);
            CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
        }

    // rank deficiency names the failing index
    try {
        gram_schmidt(me, {v1, v1});
        FAIL("expected RankDeficiency");
    } catch (const RankDeficiency& e) {
        CHECK(e.index == 1);
    }
}
