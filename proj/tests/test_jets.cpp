#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chenverify/jets.hpp"
#include "testutil.hpp"

#include <cmath>

using namespace chenverify;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec2(double a, double b) {
    VectorXd v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST_CASE("seeding produces coordinate jets") {
    VectorXd p = vec2(2.0, 3.0);
    Jet2 x0 = jet2_seed(p, 0);
    CHECK(x0.value == 2.0);
    CHECK(x0.grad[0] == 1.0);
    CHECK(x0.grad[1] == 0.0);
    CHECK(x0.hess.norm() == 0.0);

    VectorXd p1(1);
    p1 << 0.0;
    Jet2 y = jet2_seed(p1, 0);
    CHECK(y.value == 0.0);
    CHECK(y.grad[0] == 1.0);

    VectorXd p3(3);
    p3 << 1.0, 2.0, 3.0;
    Jet2 z = jet2_seed(p3, 2);
    CHECK(z.value == 3.0);
    CHECK(z.grad[2] == 1.0);
    CHECK(z.grad[0] == 0.0);

    CHECK_THROWS_AS(jet2_seed(p, 2), std::out_of_range);
    CHECK_THROWS_AS(jet2_seed(p, -1), std::out_of_range);
}

TEST_CASE("basic arithmetic rules") {
    VectorXd p1(1);
    p1 << 2.0;
    Jet2 x = jet2_seed(p1, 0);

    Jet2 sq = x * x;
    CHECK(sq.value == 4.0);
    CHECK(sq.grad[0] == 4.0);
    CHECK(sq.hess(0, 0) == 2.0);

    VectorXd p = vec2(1.0, 1.0);
    Jet2 s = jet2_seed(p, 0) + jet2_seed(p, 1);
    CHECK(s.value == 2.0);
    CHECK(s.grad[0] == 1.0);
    CHECK(s.grad[1] == 1.0);
    CHECK(s.hess.norm() == 0.0);

    // 1/x at x0 = 2
    Jet2 inv = Jet2(1.0) / x;
    CHECK(inv.value == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(inv.grad[0] == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(inv.hess(0, 0) == doctest::Approx(0.25).epsilon(1e-14));

    CHECK_THROWS_AS(x / Jet2(0.0), std::domain_error);
}

TEST_CASE("unary functions") {
    VectorXd p1(1);

    p1 << 0.0;
    Jet2 x0 = jet2_seed(p1, 0);
    Jet2 s = sin(x0);
    CHECK(s.value == 0.0);
    CHECK(s.grad[0] == 1.0);
    CHECK(s.hess(0, 0) == 0.0);

    Jet2 e = exp(x0);
    CHECK(e.value == 1.0);
    CHECK(e.grad[0] == 1.0);
    CHECK(e.hess(0, 0) == 1.0);

    p1 << 2.0;
    Jet2 x2 = jet2_seed(p1, 0);
    Jet2 l = log(x2);
    CHECK(l.value == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(l.grad[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(l.hess(0, 0) == doctest::Approx(-0.25).epsilon(1e-15));

    p1 << 4.0;
    Jet2 x4 = jet2_seed(p1, 0);
    Jet2 r = sqrt(x4);
    CHECK(r.value == doctest::Approx(2.0));
    CHECK(r.grad[0] == doctest::Approx(0.25));
    CHECK(r.hess(0, 0) == doctest::Approx(-1.0 / 32.0));

    p1 << -1.0;
    Jet2 xneg = jet2_seed(p1, 0);
    CHECK_THROWS_AS(log(xneg), std::domain_error);
    CHECK_THROWS_AS(sqrt(xneg), std::domain_error);
}

TEST_CASE("pow: integer exponents keep negative bases legal") {
    VectorXd p1(1);
    p1 << -2.0;
    Jet2 x = jet2_seed(p1, 0);

    Jet2 cube = pow(x, 3.0);
    CHECK(cube.value == -8.0);
    CHECK(cube.grad[0] == 12.0);        // 3x^2
    CHECK(cube.hess(0, 0) == -12.0);    // 6x

    Jet2 invsq = pow(x, -2.0);
    CHECK(invsq.value == doctest::Approx(0.25));
    CHECK(invsq.grad[0] == doctest::Approx(0.25));  // -2 x^-3 = 0.25

    CHECK_THROWS_AS(pow(x, 0.5), std::domain_error);

    p1 << 2.0;
    Jet2 y = jet2_seed(p1, 0);
    Jet2 g = pow(y, 0.5);
    CHECK(g.value == doctest::Approx(std::sqrt(2.0)));

    // jet-valued exponent: x^x at 2 -> value 4, d/dx = x^x (ln x + 1)
    Jet2 xx = pow(y, y);
    CHECK(xx.value == doctest::Approx(4.0));
    CHECK(xx.grad[0] == doctest::Approx(4.0 * (std::log(2.0) + 1.0)));
}

TEST_CASE("gradients and Hessians of random polynomial-ish expressions match "
          "finite differences") {
    cvtest::Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        int d = rng.integer(1, 4);
        VectorXd x = rng.uniform_vec(d, 0.5, 2.0);
        double c0 = rng.uniform(-2, 2), c1 = rng.uniform(-2, 2),
               c2 = rng.uniform(-2, 2);

        auto fn = [&](auto seeds) {
            using S = typename decltype(seeds)::value_type;
            S acc = S(c0);
            for (int i = 0; i < d; ++i) {
                acc = acc + S(c1) * seeds[i] * seeds[(i + 1) % d];
                acc = acc + S(c2) * sin(seeds[i]) * exp(S(0.3) * seeds[i]);
                acc = acc + tanh(seeds[i]) / sqrt(seeds[(i + 2) % d] + S(3.0));
            }
            return acc;
        };

        Jet2 out = fn(jet2_seed_all(x));
        auto plain = [&](const VectorXd& q) {
            std::vector<Jet2> consts;
            for (Eigen::Index i = 0; i < q.size(); ++i)
                consts.push_back(Jet2(q[i]));
            return fn(consts).value;
        };

        VectorXd gfd = cvtest::fd_gradient(plain, x);
        MatrixXd hfd = cvtest::fd_hessian(plain, x);
        CHECK((out.grad - gfd).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((out.hess - hfd).cwiseAbs().maxCoeff() < 1e-6);
        // exact symmetry
        CHECK((out.hess - out.hess.transpose()).norm() == 0.0);
    }
}

TEST_CASE("mul is commutative and near-associative") {
    cvtest::Rng rng(7);
    VectorXd x = rng.uniform_vec(3, 0.2, 1.5);
    auto seeds = jet2_seed_all(x);
    Jet2 a = sin(seeds[0]) + seeds[1];
    Jet2 b = exp(Jet2(0.2) * seeds[2]);
    Jet2 c = seeds[0] * seeds[2] + Jet2(0.5);

    Jet2 ab = a * b, ba = b * a;
    CHECK(ab.value == ba.value);
    CHECK((ab.grad - ba.grad).norm() == 0.0);
    CHECK((ab.hess - ba.hess).norm() == 0.0);

    Jet2 l = (a * b) * c, r = a * (b * c);
    CHECK(l.value == doctest::Approx(r.value).epsilon(1e-14));
    CHECK((l.grad - r.grad).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((l.hess - r.hess).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("dual arithmetic matches jet2 first-order slots") {
    cvtest::Rng rng(11);
    VectorXd x = rng.uniform_vec(3, 0.4, 1.8);
    auto j = jet2_seed_all(x);
    auto dl = dual_seed_all(x);

    Jet2 jr = sin(j[0]) * j[1] + pow(j[2], 3.0) / (j[0] + Jet2(2.0)) -
              tanh(j[1] * j[2]);
    Dual dr = sin(dl[0]) * dl[1] + pow(dl[2], 3.0) / (dl[0] + Dual(2.0)) -
              tanh(dl[1] * dl[2]);
    CHECK(dr.value == doctest::Approx(jr.value).epsilon(1e-15));
    CHECK((dr.grad - jr.grad).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("partial extraction lowers a jet order consistently") {
    cvtest::Rng rng(13);
    VectorXd x = rng.uniform_vec(2, 0.3, 1.2);
    auto j = jet2_seed_all(x);
    Jet2 f = sin(j[0] * j[1]) + pow(j[0], 2.0);
    Dual df0 = partial(f, 0);
    CHECK(df0.value == doctest::Approx(f.grad[0]).epsilon(1e-15));
    CHECK(df0.grad[1] == doctest::Approx(f.hess(0, 1)).epsilon(1e-15));
}

TEST_CASE("Eigen containers of jets behave") {
    VectorXd p = vec2(1.0, 2.0);
    auto s = jet2_seed_all(p);
    Eigen::Matrix<Jet2, Eigen::Dynamic, Eigen::Dynamic> m(2, 2);
    m(0, 0) = s[0];
    m(0, 1) = s[1];
    m(1, 0) = s[0] * s[1];
    m(1, 1) = Jet2(1.0);
    auto prod = (m * m).eval();
    // (0,0) entry = x*x + y*(x*y) ; value = 1 + 2*2 = 5
    CHECK(prod(0, 0).value == doctest::Approx(5.0));
    // d/dx (x^2 + x y^2) = 2x + y^2 = 6
    CHECK(prod(0, 0).grad[0] == doctest::Approx(6.0));
    // d/dy (x^2 + x y^2) = 2xy = 4
    CHECK(prod(0, 0).grad[1] == doctest::Approx(4.0));
}
