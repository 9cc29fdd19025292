#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace chenverify {

// Small dense rank-3/rank-4 tensors over an arbitrary scalar, backed by one
// Eigen vector. Chart dimensions stay small (<= 16) so everything is dense.

template <typename T = double>
class Tensor3T {
  public:
    Tensor3T() = default;
    Tensor3T(Eigen::Index n0, Eigen::Index n1, Eigen::Index n2)
        : n0_(n0), n1_(n1), n2_(n2) {
        data_.setConstant(n0 * n1 * n2, T(0));
    }

    T& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) {
        return data_[(i * n1_ + j) * n2_ + k];
    }
    const T& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
        return data_[(i * n1_ + j) * n2_ + k];
    }

    Eigen::Index dim0() const { return n0_; }
    Eigen::Index dim1() const { return n1_; }
    Eigen::Index dim2() const { return n2_; }
    bool empty() const { return data_.size() == 0; }

    Eigen::Matrix<T, Eigen::Dynamic, 1>& raw() { return data_; }
    const Eigen::Matrix<T, Eigen::Dynamic, 1>& raw() const { return data_; }

  private:
    Eigen::Index n0_ = 0, n1_ = 0, n2_ = 0;
    Eigen::Matrix<T, Eigen::Dynamic, 1> data_;
};

template <typename T = double>
class Tensor4T {
  public:
    Tensor4T() = default;
    Tensor4T(Eigen::Index n0, Eigen::Index n1, Eigen::Index n2,
             Eigen::Index n3)
        : n0_(n0), n1_(n1), n2_(n2), n3_(n3) {
        data_.setConstant(n0 * n1 * n2 * n3, T(0));
    }

    T& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k,
                  Eigen::Index l) {
        return data_[((i * n1_ + j) * n2_ + k) * n3_ + l];
    }
    const T& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k,
                        Eigen::Index l) const {
        return data_[((i * n1_ + j) * n2_ + k) * n3_ + l];
    }

    Eigen::Index dim0() const { return n0_; }
    Eigen::Index dim1() const { return n1_; }
    Eigen::Index dim2() const { return n2_; }
    Eigen::Index dim3() const { return n3_; }
    bool empty() const { return data_.size() == 0; }

    Eigen::Matrix<T, Eigen::Dynamic, 1>& raw() { return data_; }
    const Eigen::Matrix<T, Eigen::Dynamic, 1>& raw() const { return data_; }

  private:
    Eigen::Index n0_ = 0, n1_ = 0, n2_ = 0, n3_ = 0;
    Eigen::Matrix<T, Eigen::Dynamic, 1> data_;
};

using Tensor3 = Tensor3T<double>;
using Tensor4 = Tensor4T<double>;

inline double max_abs(const Tensor3& t) {
    return t.empty() ? 0.0 : t.raw().cwiseAbs().maxCoeff();
}
inline double max_abs(const Tensor4& t) {
    return t.empty() ? 0.0 : t.raw().cwiseAbs().maxCoeff();
}

/// Contracts all four slots with column frames:
/// out(p,q,r,s) = t(i,j,k,l) c1(i,p) c2(j,q) c3(k,r) c4(l,s).
inline Tensor4 contract_all4(const Tensor4& t, const Eigen::MatrixXd& c1,
                             const Eigen::MatrixXd& c2,
                             const Eigen::MatrixXd& c3,
                             const Eigen::MatrixXd& c4) {
    const Eigen::Index d0 = t.dim0(), d1 = t.dim1(), d2 = t.dim2(),
                       d3 = t.dim3();
    const Eigen::Index p0 = c1.cols(), p1 = c2.cols(), p2 = c3.cols(),
                       p3 = c4.cols();
    Tensor4 t1(p0, d1, d2, d3);
    for (Eigen::Index p = 0; p < p0; ++p)
        for (Eigen::Index j = 0; j < d1; ++j)
            for (Eigen::Index k = 0; k < d2; ++k)
                for (Eigen::Index l = 0; l < d3; ++l) {
                    double acc = 0;
                    for (Eigen::Index i = 0; i < d0; ++i)
                        acc += t(i, j, k, l) * c1(i, p);
                    t1(p, j, k, l) = acc;
                }
    Tensor4 t2(p0, p1, d2, d3);
    for (Eigen::Index p = 0; p < p0; ++p)
        for (Eigen::Index q = 0; q < p1; ++q)
            for (Eigen::Index k = 0; k < d2; ++k)
                for (Eigen::Index l = 0; l < d3; ++l) {
                    double acc = 0;
                    for (Eigen::Index j = 0; j < d1; ++j)
                        acc += t1(p, j, k, l) * c2(j, q);
                    t2(p, q, k, l) = acc;
                }
    Tensor4 t3(p0, p1, p2, d3);
    for (Eigen::Index p = 0; p < p0; ++p)
        for (Eigen::Index q = 0; q < p1; ++q)
            for (Eigen::Index r = 0; r < p2; ++r)
                for (Eigen::Index l = 0; l < d3; ++l) {
                    double acc = 0;
                    for (Eigen::Index k = 0; k < d2; ++k)
                        acc += t2(p, q, k, l) * c3(k, r);
                    t3(p, q, r, l) = acc;
                }
    Tensor4 out(p0, p1, p2, p3);
    for (Eigen::Index p = 0; p < p0; ++p)
        for (Eigen::Index q = 0; q < p1; ++q)
            for (Eigen::Index r = 0; r < p2; ++r)
                for (Eigen::Index s = 0; s < p3; ++s) {
                    double acc = 0;
                    for (Eigen::Index l = 0; l < d3; ++l)
                        acc += t3(p, q, r, l) * c4(l, s);
                    out(p, q, r, s) = acc;
                }
    return out;
}

}  // namespace chenverify
