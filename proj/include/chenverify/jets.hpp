#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace chenverify {

// Forward-mode differentiation scalars. DualT carries a value and its
// gradient with respect to the active chart; Jet2T additionally carries the
// Hessian. A jet with empty derivative storage represents a constant and
// promotes to the dimension of the other operand.
//
// Invariant: grad and hess are either both empty (constant) or both sized
// (d and d x d). Hessians stay exactly symmetric because every rule below
// only ever adds symmetric pieces.

template <typename T = double>
struct DualT {
    using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

    T value{0};
    Vector grad;

    DualT() = default;
    DualT(T v) : value(v) {}  // NOLINT: implicit, constants promote
    DualT(T v, Vector g) : value(v), grad(std::move(g)) {}

    bool is_constant() const { return grad.size() == 0; }
    Eigen::Index dim() const { return grad.size(); }
};

template <typename T = double>
struct Jet2T {
    using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

    T value{0};
    Vector grad;
    Matrix hess;

    Jet2T() = default;
    Jet2T(T v) : value(v) {}  // NOLINT: implicit, constants promote
    Jet2T(T v, Vector g, Matrix h)
        : value(v), grad(std::move(g)), hess(std::move(h)) {}

    bool is_constant() const { return grad.size() == 0; }
    Eigen::Index dim() const { return grad.size(); }
};

using Dual = DualT<double>;
using Jet2 = Jet2T<double>;

// --------------------------------------------------------------------------
// Seeding
// --------------------------------------------------------------------------

/// Coordinate-variable jet: value point[index], gradient e_index, Hessian 0.
template <typename T>
Jet2T<T> jet2_seed(const Eigen::Matrix<T, Eigen::Dynamic, 1>& point,
                   Eigen::Index index) {
    if (index < 0 || index >= point.size())
        throw std::out_of_range("jet2_seed: index " + std::to_string(index) +
                                " out of range for dimension " +
                                std::to_string(point.size()));
    Jet2T<T> j;
    j.value = point[index];
    j.grad = Eigen::Matrix<T, Eigen::Dynamic, 1>::Zero(point.size());
    j.grad[index] = T(1);
    j.hess = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>::Zero(
        point.size(), point.size());
    return j;
}

template <typename T>
DualT<T> dual_seed(const Eigen::Matrix<T, Eigen::Dynamic, 1>& point,
                   Eigen::Index index) {
    if (index < 0 || index >= point.size())
        throw std::out_of_range("dual_seed: index " + std::to_string(index) +
                                " out of range for dimension " +
                                std::to_string(point.size()));
    DualT<T> j;
    j.value = point[index];
    j.grad = Eigen::Matrix<T, Eigen::Dynamic, 1>::Zero(point.size());
    j.grad[index] = T(1);
    return j;
}

template <typename T>
std::vector<Jet2T<T>> jet2_seed_all(
    const Eigen::Matrix<T, Eigen::Dynamic, 1>& point) {
    std::vector<Jet2T<T>> out;
    out.reserve(static_cast<size_t>(point.size()));
    for (Eigen::Index i = 0; i < point.size(); ++i)
        out.push_back(jet2_seed(point, i));
    return out;
}

template <typename T>
std::vector<DualT<T>> dual_seed_all(
    const Eigen::Matrix<T, Eigen::Dynamic, 1>& point) {
    std::vector<DualT<T>> out;
    out.reserve(static_cast<size_t>(point.size()));
    for (Eigen::Index i = 0; i < point.size(); ++i)
        out.push_back(dual_seed(point, i));
    return out;
}

namespace detail {

template <typename T>
Eigen::Index joint_dim(Eigen::Index a, Eigen::Index b) {
    if (a == 0) return b;
    if (b == 0) return a;
    if (a != b)
        throw std::invalid_argument("jet dimensions disagree: " +
                                    std::to_string(a) + " vs " +
                                    std::to_string(b));
    return a;
}

template <typename T>
typename DualT<T>::Vector grad_or_zero(const DualT<T>& j, Eigen::Index d) {
    if (j.grad.size() != 0) return j.grad;
    return DualT<T>::Vector::Zero(d);
}

template <typename T>
typename Jet2T<T>::Vector grad_or_zero(const Jet2T<T>& j, Eigen::Index d) {
    if (j.grad.size() != 0) return j.grad;
    return Jet2T<T>::Vector::Zero(d);
}

template <typename T>
typename Jet2T<T>::Matrix hess_or_zero(const Jet2T<T>& j, Eigen::Index d) {
    if (j.hess.size() != 0) return j.hess;
    return Jet2T<T>::Matrix::Zero(d, d);
}

[[noreturn]] inline void domain_error(const char* fn, double value) {
    throw std::domain_error(std::string(fn) + ": domain violation at value " +
                            std::to_string(value));
}

}  // namespace detail

// --------------------------------------------------------------------------
// Dual arithmetic
// --------------------------------------------------------------------------

template <typename T>
DualT<T> operator+(const DualT<T>& a, const DualT<T>& b) {
    Eigen::Index d = detail::joint_dim<T>(a.dim(), b.dim());
    if (d == 0) return DualT<T>(a.value + b.value);
    return DualT<T>(a.value + b.value, detail::grad_or_zero(a, d) +
                                           detail::grad_or_zero(b, d));
}

template <typename T>
DualT<T> operator-(const DualT<T>& a, const DualT<T>& b) {
    Eigen::Index d = detail::joint_dim<T>(a.dim(), b.dim());
    if (d == 0) return DualT<T>(a.value - b.value);
    return DualT<T>(a.value - b.value, detail::grad_or_zero(a, d) -
                                           detail::grad_or_zero(b, d));
}

template <typename T>
DualT<T> operator-(const DualT<T>& a) {
    DualT<T> out(-a.value);
    if (!a.is_constant()) out.grad = -a.grad;
    return out;
}

template <typename T>
DualT<T> operator*(const DualT<T>& a, const DualT<T>& b) {
    Eigen::Index d = detail::joint_dim<T>(a.dim(), b.dim());
    if (d == 0) return DualT<T>(a.value * b.value);
    return DualT<T>(a.value * b.value,
                    a.value * detail::grad_or_zero(b, d) +
                        b.value * detail::grad_or_zero(a, d));
}

template <typename T>
DualT<T> operator/(const DualT<T>& a, const DualT<T>& b) {
    if (b.value == T(0)) detail::domain_error("div", 0.0);
    Eigen::Index d = detail::joint_dim<T>(a.dim(), b.dim());
    T inv = T(1) / b.value;
    if (d == 0) return DualT<T>(a.value * inv);
    return DualT<T>(a.value * inv,
                    inv * detail::grad_or_zero(a, d) -
                        (a.value * inv * inv) * detail::grad_or_zero(b, d));
}

template <typename T>
DualT<T>& operator+=(DualT<T>& a, const DualT<T>& b) { a = a + b; return a; }
template <typename T>
DualT<T>& operator-=(DualT<T>& a, const DualT<T>& b) { a = a - b; return a; }
template <typename T>
DualT<T>& operator*=(DualT<T>& a, const DualT<T>& b) { a = a * b; return a; }

/// Chain rule through a scalar function with derivative fp at a.value.
template <typename T>
DualT<T> dual_chain(const DualT<T>& a, T f, T fp) {
    DualT<T> out(f);
    if (!a.is_constant()) out.grad = fp * a.grad;
    return out;
}

template <typename T>
DualT<T> sin(const DualT<T>& a) {
    using std::sin; using std::cos;
    return dual_chain(a, sin(a.value), cos(a.value));
}
template <typename T>
DualT<T> cos(const DualT<T>& a) {
    using std::sin; using std::cos;
    return dual_chain(a, cos(a.value), -sin(a.value));
}
template <typename T>
DualT<T> exp(const DualT<T>& a) {
    using std::exp;
    T e = exp(a.value);
    return dual_chain(a, e, e);
}
template <typename T>
DualT<T> log(const DualT<T>& a) {
    using std::log;
    if (!(a.value > T(0))) detail::domain_error("log", double(a.value));
    return dual_chain(a, log(a.value), T(1) / a.value);
}
template <typename T>
DualT<T> sqrt(const DualT<T>& a) {
    using std::sqrt;
    if (!(a.value > T(0))) detail::domain_error("sqrt", double(a.value));
    T s = sqrt(a.value);
    return dual_chain(a, s, T(1) / (T(2) * s));
}
template <typename T>
DualT<T> tanh(const DualT<T>& a) {
    using std::tanh;
    T t = tanh(a.value);
    return dual_chain(a, t, T(1) - t * t);
}

template <typename T>
DualT<T> pow(const DualT<T>& a, const DualT<T>& b);

// Comparisons look at the value slot only (the usual convention for
// forward-mode scalars; Eigen's generic kernels need them).
template <typename T>
bool operator==(const DualT<T>& a, const DualT<T>& b) { return a.value == b.value; }
template <typename T>
bool operator!=(const DualT<T>& a, const DualT<T>& b) { return a.value != b.value; }
template <typename T>
bool operator<(const DualT<T>& a, const DualT<T>& b) { return a.value < b.value; }
template <typename T>
bool operator<=(const DualT<T>& a, const DualT<T>& b) { return a.value <= b.value; }
template <typename T>
bool operator>(const DualT<T>& a, const DualT<T>& b) { return a.value > b.value; }
template <typename T>
bool operator>=(const DualT<T>& a, const DualT<T>& b) { return a.value >= b.value; }

// --------------------------------------------------------------------------
// Jet2 arithmetic
// --------------------------------------------------------------------------

template <typename T>
Jet2T<T> operator+(const Jet2T<T>& a, const Jet2T<T>& b) {
    Eigen::Index d = detail::joint_dim<T>(a.dim(), b.dim());
    if (d == 0) return Jet2T<T>(a.value + b.value);
    return Jet2T<T>(a.value + b.value,
                    detail::grad_or_zero(a, d) + detail::grad_or_zero(b, d),
                    detail::hess_or_zero(a, d) + detail::hess_or_zero(b, d));
}

template <typename T>
Jet2T<T> operator-(const Jet2T<T>& a, const Jet2T<T>& b) {
    Eigen::Index d = detail::joint_dim<T>(a.dim(), b.dim());
    if (d == 0) return Jet2T<T>(a.value - b.value);
    return Jet2T<T>(a.value - b.value,
                    detail::grad_or_zero(a, d) - detail::grad_or_zero(b, d),
                    detail::hess_or_zero(a, d) - detail::hess_or_zero(b, d));
}

template <typename T>
Jet2T<T> operator-(const Jet2T<T>& a) {
    Jet2T<T> out(-a.value);
    if (!a.is_constant()) {
        out.grad = -a.grad;
        out.hess = -a.hess;
    }
    return out;
}

template <typename T>
Jet2T<T> operator*(const Jet2T<T>& a, const Jet2T<T>& b) {
    Eigen::Index d = detail::joint_dim<T>(a.dim(), b.dim());
    if (d == 0) return Jet2T<T>(a.value * b.value);
    auto ga = detail::grad_or_zero(a, d);
    auto gb = detail::grad_or_zero(b, d);
    Jet2T<T> out(a.value * b.value);
    out.grad = a.value * gb + b.value * ga;
    out.hess = a.value * detail::hess_or_zero(b, d) +
               b.value * detail::hess_or_zero(a, d) + ga * gb.transpose() +
               gb * ga.transpose();
    return out;
}

/// Chain rule through a scalar function with first/second derivatives at
/// a.value.
template <typename T>
Jet2T<T> jet2_chain(const Jet2T<T>& a, T f, T fp, T fpp) {
    Jet2T<T> out(f);
    if (!a.is_constant()) {
        out.grad = fp * a.grad;
        out.hess = fp * a.hess + fpp * (a.grad * a.grad.transpose());
    }
    return out;
}

template <typename T>
Jet2T<T> operator/(const Jet2T<T>& a, const Jet2T<T>& b) {
    if (b.value == T(0)) detail::domain_error("div", 0.0);
    T v = b.value;
    Jet2T<T> binv = jet2_chain(b, T(1) / v, -T(1) / (v * v), T(2) / (v * v * v));
    return a * binv;
}

template <typename T>
Jet2T<T>& operator+=(Jet2T<T>& a, const Jet2T<T>& b) { a = a + b; return a; }
template <typename T>
Jet2T<T>& operator-=(Jet2T<T>& a, const Jet2T<T>& b) { a = a - b; return a; }
template <typename T>
Jet2T<T>& operator*=(Jet2T<T>& a, const Jet2T<T>& b) { a = a * b; return a; }

template <typename T>
Jet2T<T> sin(const Jet2T<T>& a) {
    using std::sin; using std::cos;
    T s = sin(a.value), c = cos(a.value);
    return jet2_chain(a, s, c, -s);
}
template <typename T>
Jet2T<T> cos(const Jet2T<T>& a) {
    using std::sin; using std::cos;
    T s = sin(a.value), c = cos(a.value);
    return jet2_chain(a, c, -s, -c);
}
template <typename T>
Jet2T<T> exp(const Jet2T<T>& a) {
    using std::exp;
    T e = exp(a.value);
    return jet2_chain(a, e, e, e);
}
template <typename T>
Jet2T<T> log(const Jet2T<T>& a) {
    using std::log;
    if (!(a.value > T(0))) detail::domain_error("log", double(a.value));
    T inv = T(1) / a.value;
    return jet2_chain(a, log(a.value), inv, -inv * inv);
}
template <typename T>
Jet2T<T> sqrt(const Jet2T<T>& a) {
    using std::sqrt;
    if (!(a.value > T(0))) detail::domain_error("sqrt", double(a.value));
    T s = sqrt(a.value);
    return jet2_chain(a, s, T(1) / (T(2) * s), -T(1) / (T(4) * s * a.value));
}
template <typename T>
Jet2T<T> tanh(const Jet2T<T>& a) {
    using std::tanh;
    T t = tanh(a.value);
    T sech2 = T(1) - t * t;
    return jet2_chain(a, t, sech2, -T(2) * t * sech2);
}

namespace detail {

template <typename Jet, typename T>
Jet integer_pow(const Jet& base, long long e) {
    if (e == 0) return Jet(T(1));
    bool neg = e < 0;
    unsigned long long n = neg ? static_cast<unsigned long long>(-e)
                               : static_cast<unsigned long long>(e);
    Jet acc(T(1));
    Jet b = base;
    while (n > 0) {
        if (n & 1ULL) acc = acc * b;
        n >>= 1;
        if (n > 0) b = b * b;
    }
    if (neg) return Jet(T(1)) / acc;
    return acc;
}

inline bool nearly_integer(double x, long long& out) {
    double r = std::round(x);
    if (std::abs(x - r) < 1e-12 && std::abs(r) < 1e15) {
        out = static_cast<long long>(r);
        return true;
    }
    return false;
}

}  // namespace detail

/// Integer exponents use repeated multiplication so negative bases stay
/// legal; everything else goes through exp(b*log(a)) and requires a > 0.
template <typename T>
Jet2T<T> pow(const Jet2T<T>& a, const Jet2T<T>& b) {
    long long e = 0;
    if (b.is_constant() && detail::nearly_integer(double(b.value), e))
        return detail::integer_pow<Jet2T<T>, T>(a, e);
    if (!(a.value > T(0))) detail::domain_error("pow", double(a.value));
    return exp(b * log(a));
}

template <typename T>
DualT<T> pow(const DualT<T>& a, const DualT<T>& b) {
    long long e = 0;
    if (b.is_constant() && detail::nearly_integer(double(b.value), e))
        return detail::integer_pow<DualT<T>, T>(a, e);
    if (!(a.value > T(0))) detail::domain_error("pow", double(a.value));
    return exp(b * log(a));
}

template <typename T>
Jet2T<T> pow(const Jet2T<T>& a, double c) {
    return pow(a, Jet2T<T>(T(c)));
}
template <typename T>
DualT<T> pow(const DualT<T>& a, double c) {
    return pow(a, DualT<T>(T(c)));
}

template <typename T>
bool operator==(const Jet2T<T>& a, const Jet2T<T>& b) { return a.value == b.value; }
template <typename T>
bool operator!=(const Jet2T<T>& a, const Jet2T<T>& b) { return a.value != b.value; }
template <typename T>
bool operator<(const Jet2T<T>& a, const Jet2T<T>& b) { return a.value < b.value; }
template <typename T>
bool operator<=(const Jet2T<T>& a, const Jet2T<T>& b) { return a.value <= b.value; }
template <typename T>
bool operator>(const Jet2T<T>& a, const Jet2T<T>& b) { return a.value > b.value; }
template <typename T>
bool operator>=(const Jet2T<T>& a, const Jet2T<T>& b) { return a.value >= b.value; }

// --------------------------------------------------------------------------
// Conversions between jet orders
// --------------------------------------------------------------------------

/// Drop the Hessian slot.
template <typename T>
DualT<T> to_dual(const Jet2T<T>& j) {
    DualT<T> out(j.value);
    if (!j.is_constant()) out.grad = j.grad;
    return out;
}

/// First-order jet of the partial derivative d/dx_index of a second-order
/// jet: value from the gradient slot, gradient from the Hessian row.
template <typename T>
DualT<T> partial(const Jet2T<T>& j, Eigen::Index index) {
    if (j.is_constant()) return DualT<T>(T(0));
    if (index < 0 || index >= j.dim())
        throw std::out_of_range("partial: index out of range");
    return DualT<T>(j.grad[index], j.hess.row(index).transpose());
}

}  // namespace chenverify

// Eigen support: lets dense Eigen containers hold jet scalars. Products and
// sums use the generic scalar path; decompositions are not used on jets.
namespace Eigen {

template <typename T>
struct NumTraits<chenverify::DualT<T>> {
    using Self = chenverify::DualT<T>;
    typedef Self Real;
    typedef Self NonInteger;
    typedef Self Nested;
    typedef Self Literal;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 1,
        AddCost = 3,
        MulCost = 3
    };
    static inline Self epsilon() {
        return Self(std::numeric_limits<T>::epsilon());
    }
    static inline Self dummy_precision() { return Self(T(1e-12)); }
    static inline Self highest() {
        return Self(std::numeric_limits<T>::max());
    }
    static inline Self lowest() {
        return Self(std::numeric_limits<T>::lowest());
    }
    static inline int digits10() { return std::numeric_limits<T>::digits10; }
};

template <typename T>
struct NumTraits<chenverify::Jet2T<T>> {
    using Self = chenverify::Jet2T<T>;
    typedef Self Real;
    typedef Self NonInteger;
    typedef Self Nested;
    typedef Self Literal;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 1,
        AddCost = 6,
        MulCost = 6
    };
    static inline Self epsilon() {
        return Self(std::numeric_limits<T>::epsilon());
    }
    static inline Self dummy_precision() { return Self(T(1e-12)); }
    static inline Self highest() {
        return Self(std::numeric_limits<T>::max());
    }
    static inline Self lowest() {
        return Self(std::numeric_limits<T>::lowest());
    }
    static inline int digits10() { return std::numeric_limits<T>::digits10; }
};

}  // namespace Eigen
