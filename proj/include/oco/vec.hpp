#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oco {

// Dense real vector; the universal carrier for iterates, gradients and
// oracle outputs. Dimension is fixed per experiment.
using Vec = std::vector<double>;

inline void check_same_dim(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dimension mismatch: " + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()));
}

inline double dot(const Vec& a, const Vec& b) {
    check_same_dim(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_p(const Vec& a, double p) {
    double s = 0.0;
    for (double x : a) s += std::pow(std::abs(x), p);
    return std::pow(s, 1.0 / p);
}

inline double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

inline Vec zeros(std::size_t d) { return Vec(d, 0.0); }

inline bool is_zero(const Vec& a) {
    for (double x : a)
        if (x != 0.0) return false;
    return true;
}

inline bool all_finite(const Vec& a) {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

inline Vec scaled(const Vec& a, double c) {
    Vec r = a;
    for (double& x : r) x *= c;
    return r;
}

inline Vec add(const Vec& a, const Vec& b) {
    check_same_dim(a, b);
    Vec r = a;
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    check_same_dim(a, b);
    Vec r = a;
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return r;
}

// r += c * a
inline void axpy(Vec& r, double c, const Vec& a) {
    check_same_dim(r, a);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += c * a[i];
}

inline Vec normalized(const Vec& a) {
    double n = norm2(a);
    if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
    return scaled(a, 1.0 / n);
}

inline double dist2(const Vec& a, const Vec& b) {
    check_same_dim(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace oco
