#pragma once

#include "chenverify/jets.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace chenverify {

// Scalar-generic dense helpers shared by the plain-double geometry layer and
// the jet-valued submanifold pipeline. Pivoting decisions always look at the
// value slot, which is the standard forward-mode convention: the computed
// derivative is the derivative of the branch actually taken.

inline double scalar_value(double x) { return x; }
template <typename T>
double scalar_value(const DualT<T>& x) { return double(x.value); }
template <typename T>
double scalar_value(const Jet2T<T>& x) { return double(x.value); }

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

/// u . G v
template <typename S>
S metric_dot(const MatX<S>& metric, const VecX<S>& u, const VecX<S>& v) {
    S acc(0.0);
    for (Eigen::Index i = 0; i < u.size(); ++i)
        for (Eigen::Index j = 0; j < v.size(); ++j)
            acc += u[i] * metric(i, j) * v[j];
    return acc;
}

/// Gauss-Jordan inverse with partial pivoting on the value slot.
template <typename S>
MatX<S> invert_matrix(MatX<S> a) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("invert_matrix: not square");
    MatX<S> inv = MatX<S>::Constant(n, n, S(0.0));
    for (Eigen::Index i = 0; i < n; ++i) inv(i, i) = S(1.0);

    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index piv = col;
        double best = std::abs(scalar_value(a(col, col)));
        for (Eigen::Index r = col + 1; r < n; ++r) {
            double cand = std::abs(scalar_value(a(r, col)));
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        if (best < 1e-14)
            throw std::runtime_error("invert_matrix: singular matrix");
        if (piv != col) {
            a.row(piv).swap(a.row(col));
            inv.row(piv).swap(inv.row(col));
        }
        S d = a(col, col);
        for (Eigen::Index c = 0; c < n; ++c) {
            a(col, c) = a(col, c) / d;
            inv(col, c) = inv(col, c) / d;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == col) continue;
            S f = a(r, col);
            if (scalar_value(f) == 0.0) continue;
            for (Eigen::Index c = 0; c < n; ++c) {
                a(r, c) = a(r, c) - f * a(col, c);
                inv(r, c) = inv(r, c) - f * inv(col, c);
            }
        }
    }
    return inv;
}

struct RankDeficiency : std::runtime_error {
    int index;
    RankDeficiency(const std::string& msg, int idx)
        : std::runtime_error(msg), index(idx) {}
};

/// Metric Gram-Schmidt. With skip_dependent the near-dependent candidates
/// are dropped (used to complete normal frames from ambient basis vectors);
/// otherwise rank deficiency throws, naming the failing input index. The
/// first output stays parallel to the first input.
template <typename S>
std::vector<VecX<S>> gram_schmidt_generic(const MatX<S>& metric,
                                          const std::vector<VecX<S>>& input,
                                          bool skip_dependent,
                                          double pivot_tol = 1e-10,
                                          Eigen::Index max_count = -1) {
    std::vector<VecX<S>> out;
    for (size_t idx = 0; idx < input.size(); ++idx) {
        if (max_count >= 0 &&
            static_cast<Eigen::Index>(out.size()) >= max_count)
            break;
        VecX<S> v = input[idx];
        for (const VecX<S>& e : out) {
            S proj = metric_dot<S>(metric, v, e);
            for (Eigen::Index i = 0; i < v.size(); ++i)
                v[i] = v[i] - proj * e[i];
        }
        S nrm2 = metric_dot<S>(metric, v, v);
        if (scalar_value(nrm2) < pivot_tol * pivot_tol) {
            if (skip_dependent) continue;
            throw RankDeficiency(
                "gram_schmidt: vector " + std::to_string(idx) +
                    " is linearly dependent on its predecessors",
                static_cast<int>(idx));
        }
        using std::sqrt;
        S nrm = sqrt(nrm2);
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = v[i] / nrm;
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace chenverify
