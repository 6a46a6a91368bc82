#include "oco/projection.hpp"

#include <algorithm>
#include <cmath>

#include "oco/ellipsoid.hpp"

namespace oco {

Vec project_scaled_polar(CountingOracle& oracle, const Vec& w, double gamma, double eps,
                         double delta, double gamma_bound, ProjectionStats* stats) {
    const Body& body = oracle.body();
    const std::size_t d = body.dim();
    if (w.size() != d) throw std::invalid_argument("project_scaled_polar: dimension mismatch");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("project_scaled_polar: delta must be in (0,1)");
    if (!(eps >= 0.0 && eps < 1.0))
        throw std::invalid_argument("project_scaled_polar: eps must be in [0,1)");
    if (gamma < 0.0) throw std::invalid_argument("project_scaled_polar: gamma must be >= 0");
    const double scale = std::sqrt(1.0 - eps);

    // gamma = 0 makes the objective constant; the origin is in every polar here
    if (gamma == 0.0) {
        if (stats) *stats = ProjectionStats{0, true, {}};
        return zeros(d);
    }

    if (auto u = body.polar_project_closed_form(scaled(w, 1.0 / gamma), scale)) {
        if (stats) *stats = ProjectionStats{0, true, {}};
        return *u;
    }

    const auto& sw = body.sandwich();
    const double b = gamma_bound > 0.0 ? std::max(gamma_bound, gamma)
                                       : std::max(gamma, sw.R * norm2(w));
    const double rho = std::max(std::exp(1.0),
                                d * sw.R * (b / sw.r + norm2(w)) / (sw.r * delta));
    EllipsoidOptions opt;
    opt.enclosing_radius = 1.0 / sw.r;  // polar(C) lies inside B(1/r)
    opt.target_gap = delta;
    opt.max_iter = static_cast<int>(std::ceil(4.0 * d * d * std::log(rho / delta))) + 8;
    std::vector<double> trace;
    opt.best_trace = stats ? &trace : nullptr;

    // support-function duality at the incumbent: for a unit direction n,
    // dist(w, gamma U) >= <n, w> - gamma * scale * gauge_C(n); only worth it
    // when the gauge is a closed form
    if (body.gauge_closed_form()) {
        opt.external_bound = [&](const Vec& u_best) {
            Vec n = scaled(u_best, -gamma);
            axpy(n, 1.0, w);
            const double nn = norm2(n);
            if (nn == 0.0) return 0.0;
            n = scaled(n, 1.0 / nn);
            const double sigma = gamma * scale * body.gauge(n, 1e-12) * (1.0 + 1e-11);
            const double margin = dot(n, w) - sigma;
            return margin > 0.0 ? margin * margin : 0.0;
        };
    }

    auto result = ellipsoid_minimize(
        d,
        [&](const Vec& y) -> std::optional<Vec> {
            auto s = oracle.separate_scaled_polar(y, scale, delta);
            if (s.inside) return std::nullopt;
            return std::move(*s.hyperplane);
        },
        [&](const Vec& u) {
            Vec diff = scaled(u, gamma);
            axpy(diff, -1.0, w);
            return dot(diff, diff);
        },
        [&](const Vec& u) {
            Vec g = scaled(u, gamma);
            axpy(g, -1.0, w);
            return scaled(g, 2.0 * gamma);
        },
        opt);
    if (stats) *stats = ProjectionStats{result.iterations, false, std::move(trace)};
    return std::move(result.x);
}

SupportResult polar_lin_max(CountingOracle& oracle, const Vec& y, double gap_tol) {
    const Body& body = oracle.body();
    const std::size_t d = body.dim();
    if (is_zero(y)) return SupportResult{0.0, zeros(d)};
    const auto& sw = body.sandwich();
    EllipsoidOptions opt;
    opt.enclosing_radius = 1.0 / sw.r;
    opt.target_gap = gap_tol;
    opt.max_iter = static_cast<int>(std::ceil(
                       4.0 * d * d * std::log(std::max(16.0, sw.kappa * norm2(y) / gap_tol)))) +
                   8;
    auto result = ellipsoid_minimize(
        d,
        [&](const Vec& u) -> std::optional<Vec> {
            auto s = oracle.separate_polar(u, 1e-12);
            if (s.inside) return std::nullopt;
            return std::move(*s.hyperplane);
        },
        [&](const Vec& u) { return -dot(u, y); },
        [&](const Vec&) { return scaled(y, -1.0); },
        opt);
    return SupportResult{-result.value, std::move(result.x)};
}

Vec euclidean_project(CountingOracle& oracle, const Vec& w, double tol) {
    const Body& body = oracle.body();
    const std::size_t d = body.dim();
    if (w.size() != d) throw std::invalid_argument("euclidean_project: dimension mismatch");
    if (!(tol > 0.0)) throw std::invalid_argument("euclidean_project: tol must be > 0");

    if (const auto* ball = dynamic_cast<const EuclideanBall*>(&body)) {
        const double n = norm2(w);
        if (n <= ball->radius()) return w;
        return scaled(w, ball->radius() / n);
    }

    // centers within this gauge slack count as feasible; the induced
    // objective undershoot stays below tol/2
    const auto& sw = body.sandwich();
    const double mem_tol =
        std::clamp(tol / (8.0 * sw.r * (sw.R + norm2(w))), 1e-12, 1e-6);
    if (body.membership(w, mem_tol)) return w;

    EllipsoidOptions opt;
    opt.enclosing_radius = sw.R;
    opt.target_gap = 0.5 * tol;
    opt.max_iter = static_cast<int>(std::ceil(
                       6.0 * d * d *
                       std::log(std::max(16.0, sw.kappa * (sw.R + norm2(w)) / tol)))) +
                   16;
    // support-function duality at the incumbent: dist(w, C) >= <n, w> - sigma_C(n)
    // for the unit direction n from the incumbent toward w (one LOO call per
    // improvement)
    opt.external_bound = [&](const Vec& x_best) {
        Vec n = sub(w, x_best);
        const double nn = norm2(n);
        if (nn == 0.0) return 0.0;
        n = scaled(n, 1.0 / nn);
        const double margin = dot(n, w) - oracle.support(n).value;
        return margin > 0.0 ? margin * margin : 0.0;
    };
    auto result = ellipsoid_minimize(
        d,
        [&](const Vec& y) -> std::optional<Vec> {
            if (body.membership(y, mem_tol)) return std::nullopt;
            // separation for C from linear optimization on the polar: the
            // maximizer u in polar(C) of <u,y> has <u,y> = gauge(y) > 1 while
            // <u,x> <= 1 for all x in C
            auto s = polar_lin_max(oracle, y, 0.25 * mem_tol * sw.r);
            return std::move(s.argmax);
        },
        [&](const Vec& x) { return dist2(x, w); },
        [&](const Vec& x) {
            Vec g = sub(x, w);
            return scaled(g, 2.0);
        },
        opt);
    return std::move(result.x);
}

}  // namespace oco
