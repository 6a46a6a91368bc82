#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "oco/vec.hpp"

namespace oco {

// Thrown when an iterative solver exhausts its iteration cap without a
// certificate; carries the best iterate found and the residual gap.
class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& msg, Vec best, double residual)
        : std::runtime_error(msg), best_iterate(std::move(best)), residual_gap(residual) {}

    Vec best_iterate;
    double residual_gap;
};

struct EllipsoidOptions {
    double enclosing_radius;  // initial ellipsoid is B(enclosing_radius)
    double target_gap;        // certified absolute suboptimality
    int max_iter;
    double feasibility_tol = 0.0;             // forwarded by callers to their separation fn
    std::vector<double>* best_trace = nullptr;  // optional sink: running best per iteration
    // optional problem-specific lower bound (e.g. support-function duality at
    // the incumbent), queried whenever the best iterate improves
    std::function<double(const Vec& best)> external_bound;
};

struct EllipsoidResult {
    Vec x;
    double value;
    double gap;  // certified value - lower bound
    int iterations;
};

// Minimizes a convex objective over a convex set given a separation oracle,
// with a runtime certificate: objective cuts double as affine minorants, and
// the minorants' minima over the current ellipsoid lower-bound the optimum.
// Stops when best - bound <= target_gap; throws SolverError at the cap.
inline EllipsoidResult ellipsoid_minimize(
    std::size_t d,
    const std::function<std::optional<Vec>(const Vec&)>& separation,
    const std::function<double(const Vec&)>& objective,
    const std::function<Vec(const Vec&)>& gradient,
    const EllipsoidOptions& opt) {
    if (d < 2) throw std::invalid_argument("ellipsoid_minimize: needs dimension >= 2");
    const double n = static_cast<double>(d);
    Vec z = zeros(d);
    // P = shape matrix, row-major
    std::vector<double> P(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        P[i * d + i] = opt.enclosing_radius * opt.enclosing_radius;

    struct Cut {
        Vec g;
        double b;  // objective >= b + <g, x> everywhere
    };
    constexpr std::size_t kMaxStoredCuts = 48;
    std::vector<Cut> cuts;

    bool have_best = false;
    Vec best;
    double best_val = 0.0;
    double bound = -std::numeric_limits<double>::infinity();

    const auto mat_vec = [&](const std::vector<double>& M, const Vec& v) {
        Vec r(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += M[i * d + j] * v[j];
            r[i] = s;
        }
        return r;
    };

    int it = 0;
    for (; it < opt.max_iter; ++it) {
        Vec cut_dir;
        bool improved = false;
        auto sep = separation(z);
        if (sep.has_value()) {
            cut_dir = std::move(*sep);
        } else {
            const double fz = objective(z);
            Vec g = gradient(z);
            if (!have_best || fz < best_val) {
                have_best = true;
                best_val = fz;
                best = z;
                improved = true;
            }
            if (is_zero(g)) {
                bound = fz;
                break;  // unconstrained minimum is feasible
            }
            cuts.push_back(Cut{g, fz - dot(g, z)});
            if (cuts.size() > kMaxStoredCuts) cuts.erase(cuts.begin());
            cut_dir = std::move(g);
        }
        if (improved && opt.external_bound) bound = std::max(bound, opt.external_bound(best));

        // lower bound: each minorant's minimum over the current ellipsoid
        if (!cuts.empty()) {
            double lb = -std::numeric_limits<double>::infinity();
            for (const auto& c : cuts) {
                const Vec pg = mat_vec(P, c.g);
                const double q = std::max(dot(c.g, pg), 0.0);
                lb = std::max(lb, c.b + dot(c.g, z) - std::sqrt(q));
            }
            bound = std::max(bound, lb);
        }
        if (opt.best_trace && have_best) opt.best_trace->push_back(best_val);
        if (have_best && best_val - bound <= opt.target_gap) break;

        // central cut along cut_dir
        const Vec pg = mat_vec(P, cut_dir);
        const double q = dot(cut_dir, pg);
        if (!(q > 0.0) || !std::isfinite(q)) break;  // collapsed ellipsoid
        const double denom = std::sqrt(q);
        for (std::size_t i = 0; i < d; ++i) z[i] -= pg[i] / (denom * (n + 1.0));
        // the slight inflation keeps the true minimizer inside the ellipsoid
        // under floating-point drift; without it the certificate can go stale
        const double scale = n * n / (n * n - 1.0) * (1.0 + 1e-12);
        const double coef = 2.0 / (n + 1.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                P[i * d + j] = scale * (P[i * d + j] - coef * pg[i] * pg[j] / q);
        // keep the shape matrix symmetric against roundoff
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) {
                const double m = 0.5 * (P[i * d + j] + P[j * d + i]);
                P[i * d + j] = P[j * d + i] = m;
            }
    }

    if (!have_best)
        throw SolverError("ellipsoid_minimize: no feasible center found", zeros(d),
                          std::numeric_limits<double>::infinity());
    const double gap = best_val - bound;
    if (gap > opt.target_gap)
        throw SolverError("ellipsoid_minimize: stopped before certification (gap " +
                              std::to_string(gap) + " > " + std::to_string(opt.target_gap) + ")",
                          best, gap);
    return EllipsoidResult{std::move(best), best_val, gap, it};
}

}  // namespace oco
