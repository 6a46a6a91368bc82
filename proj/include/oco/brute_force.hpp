#pragma once

#include <functional>

#include "oco/vec.hpp"

namespace oco {

// Reference oracles used only for verification. They share no code with the
// paths they check: boundary points come from per-ray bisection on the gauge,
// and extrema from dense enumeration.

// Radius at which the ray through `dir` (unit) crosses the gauge-1 boundary,
// found by bisection to absolute accuracy 1e-10 * hi.
inline double boundary_radius_bisect(const std::function<double(const Vec&)>& gauge_fn,
                                     const Vec& dir, double hi) {
    double lo = 0.0, up = hi;
    // widen until the bracket actually straddles the boundary
    while (gauge_fn(scaled(dir, up)) < 1.0) up *= 2.0;
    for (int i = 0; i < 80 && up - lo > 1e-10 * hi; ++i) {
        const double mid = 0.5 * (lo + up);
        if (gauge_fn(scaled(dir, mid)) <= 1.0)
            lo = mid;
        else
            up = mid;
    }
    return 0.5 * (lo + up);
}

struct BruteSupport {
    double value;
    Vec argmax;
};

// d = 2 only: maximize <v, w> over the gauge-1 boundary. Coarse sweep over
// n_angles rays, then golden refinement of the angle; each ray meets the
// boundary by bisection. Valid for strictly convex boundaries, where the
// angular objective has a single maximum.
inline BruteSupport angular_support_2d(const std::function<double(const Vec&)>& gauge_fn,
                                       const Vec& w, int n_angles, double radius_hint) {
    const double two_pi = 6.283185307179586476925287;
    const auto value_at = [&](double a) {
        const Vec dir{std::cos(a), std::sin(a)};
        const double rad = boundary_radius_bisect(gauge_fn, dir, radius_hint);
        return std::pair<double, Vec>(rad * (dir[0] * w[0] + dir[1] * w[1]),
                                      scaled(dir, rad));
    };
    double best_a = 0.0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_angles; ++i) {
        const double a = two_pi * i / n_angles;
        const double v = value_at(a).first;
        if (v > best_v) {
            best_v = v;
            best_a = a;
        }
    }
    double lo = best_a - two_pi / n_angles, hi = best_a + two_pi / n_angles;
    const double gr = (std::sqrt(5.0) + 1.0) / 2.0;
    double c = hi - (hi - lo) / gr, d = lo + (hi - lo) / gr;
    double fc = value_at(c).first, fd = value_at(d).first;
    for (int i = 0; i < 60; ++i) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - (hi - lo) / gr;
            fc = value_at(c).first;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + (hi - lo) / gr;
            fd = value_at(d).first;
        }
    }
    auto [v, pt] = value_at(0.5 * (lo + hi));
    if (v < best_v) return BruteSupport{best_v, value_at(best_a).second};
    return BruteSupport{v, pt};
}

}  // namespace oco
