#pragma once

#include <Eigen/Dense>

#include <functional>
#include <random>

// Shared test-only helpers: central finite differences used as the
// independent oracle for jet gradients/Hessians, and a seeded RNG wrapper.

namespace cvtest {

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

inline Eigen::VectorXd fd_gradient(const ScalarFn& f, const Eigen::VectorXd& x,
                                   double h = 1e-4) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2 * h);
    }
    return g;
}

inline Eigen::MatrixXd fd_hessian(const ScalarFn& f, const Eigen::VectorXd& x,
                                  double h = 1e-4) {
    Eigen::Index d = x.size();
    Eigen::MatrixXd hm(d, d);
    double f0 = f(x);
    for (Eigen::Index i = 0; i < d; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        hm(i, i) = (f(xp) - 2 * f0 + f(xm)) / (h * h);
        for (Eigen::Index j = i + 1; j < d; ++j) {
            Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += h; xpp[j] += h;
            xpm[i] += h; xpm[j] -= h;
            xmp[i] -= h; xmp[j] += h;
            xmm[i] -= h; xmm[j] -= h;
            double v = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4 * h * h);
            hm(i, j) = v;
            hm(j, i) = v;
        }
    }
    return hm;
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    double gauss() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
    int integer(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(gen);
    }
    Eigen::VectorXd uniform_vec(Eigen::Index n, double lo, double hi) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }
    Eigen::VectorXd gauss_vec(Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss();
        return v;
    }
};

}  // namespace cvtest
