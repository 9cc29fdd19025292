#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chenverify/expression.hpp"
#include "ast_gen.hpp"
#include "testutil.hpp"

#include <cmath>

using namespace chenverify;
using Eigen::VectorXd;

namespace {

const std::vector<std::string> kXY = {"x1", "x2"};
const std::vector<std::string> kX = {"x1"};

VectorXd vec(std::initializer_list<double> v) {
    VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

}  // namespace

TEST_CASE("basic parses and jet evaluation") {
    ExprAst ast = ExprAst::parse("x1^2 + sin(x2)", kXY);
    Jet2 j = ast.eval_jet(vec({2.0, 0.0}));
    CHECK(j.value == doctest::Approx(4.0));
    CHECK(j.grad[0] == doctest::Approx(4.0));
    CHECK(j.grad[1] == doctest::Approx(1.0));
    CHECK(j.hess(0, 0) == doctest::Approx(2.0));
    CHECK(j.hess(1, 1) == doctest::Approx(0.0));
    CHECK(j.hess(0, 1) == doctest::Approx(0.0));

    ExprAst one = ExprAst::parse("1", kXY);
    Jet2 c = one.eval_jet(vec({7.0, -3.0}));
    CHECK(c.value == 1.0);
    CHECK((c.is_constant() || c.grad.cwiseAbs().maxCoeff() == 0.0));
}

TEST_CASE("syntax errors carry byte offsets") {
    try {
        ExprAst::parse("x1*(", kXY);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset == 4);
    }
    try {
        ExprAst::parse("x1 + foo", kXY);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset == 5);
        CHECK(std::string(e.what()).find("foo") != std::string::npos);
    }
    CHECK_THROWS_AS(ExprAst::parse("sin + 1", kXY), ParseError);
    CHECK_THROWS_AS(ExprAst::parse("sins(x1)", kXY), ParseError);
    CHECK_THROWS_AS(ExprAst::parse("", kXY), ParseError);
    CHECK_THROWS_AS(ExprAst::parse("1 2", kXY), ParseError);
    CHECK_THROWS_AS(ExprAst::parse("(x1", kXY), ParseError);
}

TEST_CASE("precedence and associativity") {
    CHECK(ExprAst::parse("2*3+4*5", kX).eval_value(vec({0.0})) ==
          doctest::Approx(26.0));
    CHECK(ExprAst::parse("2^3^2", kX).eval_value(vec({0.0})) ==
          doctest::Approx(512.0));
    CHECK(ExprAst::parse("-x1^2", kX).eval_value(vec({3.0})) ==
          doctest::Approx(-9.0));
    CHECK(ExprAst::parse("x1^-2", kX).eval_value(vec({2.0})) ==
          doctest::Approx(0.25));
    CHECK(ExprAst::parse("2-3-4", kX).eval_value(vec({0.0})) ==
          doctest::Approx(-5.0));
    CHECK(ExprAst::parse("12/4/3", kX).eval_value(vec({0.0})) ==
          doctest::Approx(1.0));
    CHECK(ExprAst::parse("pi", kX).eval_value(vec({0.0})) ==
          doctest::Approx(M_PI));
    CHECK(ExprAst::parse("1.5e2", kX).eval_value(vec({0.0})) ==
          doctest::Approx(150.0));
    // integer powers of negative bases are legal
    CHECK(ExprAst::parse("(-2)^3", kX).eval_value(vec({0.0})) ==
          doctest::Approx(-8.0));
}

TEST_CASE("spec examples for eval_jet") {
    Jet2 j = ExprAst::parse("x1*x2", kXY).eval_jet(vec({3.0, 5.0}));
    CHECK(j.value == doctest::Approx(15.0));
    CHECK(j.grad[0] == doctest::Approx(5.0));
    CHECK(j.grad[1] == doctest::Approx(3.0));
    CHECK(j.hess(0, 1) == doctest::Approx(1.0));
    CHECK(j.hess(1, 0) == doctest::Approx(1.0));

    Jet2 e = ExprAst::parse("exp(0*x1)", kX).eval_jet(vec({7.0}));
    CHECK(e.value == doctest::Approx(1.0));
    CHECK(e.grad[0] == doctest::Approx(0.0));
    CHECK(e.hess(0, 0) == doctest::Approx(0.0));

    Jet2 s = ExprAst::parse("sqrt(x1)", kX).eval_jet(vec({4.0}));
    CHECK(s.value == doctest::Approx(2.0));
    CHECK(s.grad[0] == doctest::Approx(0.25));
    CHECK(s.hess(0, 0) == doctest::Approx(-1.0 / 32.0));

    CHECK_THROWS_AS(ExprAst::parse("log(x1)", kX).eval_jet(vec({-1.0})),
                    EvalError);
}

TEST_CASE("print/parse round trip is a fixed point") {
    cvtest::Rng rng(91);
    for (int trial = 0; trial < 200; ++trial) {
        int nvars = rng.integer(1, 3);
        std::vector<std::string> vars;
        for (int i = 0; i < nvars; ++i)
            vars.push_back("x" + std::to_string(i + 1));
        VectorXd probe = rng.uniform_vec(nvars, 0.5, 1.5);
        auto ast = cvtest::tame_ast(rng, vars, probe, 5);
        if (!ast) continue;
        ExprAst once = ExprAst::parse(ast->to_string(), vars);
        ExprAst twice = ExprAst::parse(once.to_string(), vars);
        CHECK(once == twice);
        // and the printed value agrees
        CHECK(once.eval_value(probe) ==
              doctest::Approx(ast->eval_value(probe)).epsilon(1e-12));
    }
}

TEST_CASE("jet evaluation over random ASTs matches plain values and finite "
          "differences") {
    cvtest::Rng rng(1234);
    int tested = 0;
    while (tested < 60) {
        int nvars = rng.integer(1, 3);
        std::vector<std::string> vars;
        for (int i = 0; i < nvars; ++i)
            vars.push_back("x" + std::to_string(i + 1));
        VectorXd probe = rng.uniform_vec(nvars, 0.5, 1.5);
        auto ast = cvtest::tame_ast(rng, vars, probe, 6);
        if (!ast) continue;
        ++tested;

        Jet2 j = ast->eval_jet(probe);
        CHECK(j.value == doctest::Approx(ast->eval_value(probe)));

        auto plain = [&](const VectorXd& x) { return ast->eval_value(x); };
        VectorXd gfd = cvtest::fd_gradient(plain, probe);
        Eigen::MatrixXd hfd = cvtest::fd_hessian(plain, probe);
        CHECK((j.grad - gfd).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((j.hess - hfd).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("symbolic derivative matches jet gradient") {
    cvtest::Rng rng(777);
    int tested = 0;
    while (tested < 40) {
        int nvars = rng.integer(1, 3);
        std::vector<std::string> vars;
        for (int i = 0; i < nvars; ++i)
            vars.push_back("u" + std::to_string(i + 1));
        VectorXd probe = rng.uniform_vec(nvars, 0.5, 1.5);
        auto ast = cvtest::tame_ast(rng, vars, probe, 5);
        if (!ast) continue;
        ++tested;
        Jet2 j = ast->eval_jet(probe);
        for (int v = 0; v < nvars; ++v) {
            ExprAst dv = ast->derivative(v);
            CHECK(dv.eval_value(probe) ==
                  doctest::Approx(j.grad[v]).epsilon(1e-9));
            // derivative of the derivative recovers Hessian rows
            Dual dd = dv.eval_dual(probe);
            for (int w = 0; w < nvars; ++w) {
                double hvw = dd.is_constant() ? 0.0 : dd.grad[w];
                CHECK(hvw == doctest::Approx(j.hess(v, w))
                                 .epsilon(1e-8)
                                 .scale(1 + std::abs(j.hess(v, w))));
            }
        }
    }
}

TEST_CASE("derivative of simple closed forms") {
    ExprAst f = ExprAst::parse("x1^3 + 2*x1*x2", kXY);
    ExprAst d0 = f.derivative(0);
    CHECK(d0.eval_value(vec({2.0, 5.0})) == doctest::Approx(3 * 4 + 10.0));
    ExprAst d1 = f.derivative(1);
    CHECK(d1.eval_value(vec({2.0, 5.0})) == doctest::Approx(4.0));
    // constant folding keeps derivative trees small
    ExprAst c = ExprAst::parse("3.5", kXY);
    CHECK(c.derivative(0).is_constant_zero());
}
