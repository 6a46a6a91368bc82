#include "oco/body.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "oco/rng.hpp"

namespace oco {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_input(const Vec& g, std::size_t dim) {
    if (g.size() != dim)
        throw std::invalid_argument("dimension mismatch: body has d=" + std::to_string(dim) +
                                    ", input has d=" + std::to_string(g.size()));
    if (!all_finite(g)) throw std::invalid_argument("non-finite input vector");
}

// key=value,... parser for body config strings
std::map<std::string, std::string> parse_kv(const std::string& s) {
    std::map<std::string, std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        require(eq != std::string::npos, "malformed body option: " + item);
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

}  // namespace

bool Body::membership(const Vec& w, double tol) const { return gauge(w, tol) <= 1.0 + tol; }

// ---------------------------------------------------------------------------
// EuclideanBall

EuclideanBall::EuclideanBall(std::size_t dim, double radius)
    : Body(dim, BodySandwich{radius, radius, 1.0}, 1.0 / radius), radius_(radius) {
    require(dim >= 1, "ball: dimension must be >= 1");
    require(radius > 0.0 && std::isfinite(radius), "ball: radius must be positive");
}

Vec EuclideanBall::lin_min(const Vec& g) const {
    check_input(g, dim_);
    const double n = norm2(g);
    if (n == 0.0) return zeros(dim_);
    return scaled(g, -radius_ / n);
}

double EuclideanBall::gauge(const Vec& w, double) const {
    check_input(w, dim_);
    return norm2(w) / radius_;
}

bool EuclideanBall::membership(const Vec& w, double tol) const {
    check_input(w, dim_);
    return norm2(w) <= radius_ * (1.0 + tol);
}

std::optional<Vec> EuclideanBall::polar_project_closed_form(const Vec& w, double scale) const {
    // polar of B(R) is B(1/R)
    const double rad = scale / radius_;
    const double n = norm2(w);
    if (n <= rad) return w;
    return scaled(w, rad / n);
}

std::string EuclideanBall::describe() const {
    return "ball:R=" + std::to_string(radius_) + ",d=" + std::to_string(dim_);
}

// ---------------------------------------------------------------------------
// LpBall

LpBall::LpBall(std::size_t dim, double p, double radius, double declared_mu)
    : Body(dim, BodySandwich{}, 0.0), p_(p), q_(p / (p - 1.0)), radius_(radius) {
    require(dim >= 1, "lp: dimension must be >= 1");
    require(p > 1.0 && p <= 2.0, "lp: p must lie in (1, 2]");
    require(radius > 0.0 && std::isfinite(radius), "lp: radius must be positive");
    // for p <= 2: ||x||_2 <= ||x||_p <= d^{1/p-1/2} ||x||_2
    const double shrink = std::pow(static_cast<double>(dim), 0.5 - 1.0 / p);
    sandwich_ = BodySandwich{radius * shrink, radius, 1.0 / shrink};
    mu_ = declared_mu > 0.0 ? declared_mu : (p - 1.0) / radius * shrink;
}

Vec LpBall::lin_min(const Vec& g) const {
    check_input(g, dim_);
    if (is_zero(g)) return zeros(dim_);
    // Hoelder: minimizer has |v_i| proportional to |g_i|^{q-1}
    const double nq = norm_p(g, q_);
    Vec v(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        const double m = std::pow(std::abs(g[i]) / nq, q_ - 1.0);
        v[i] = (g[i] > 0.0 ? -1.0 : (g[i] < 0.0 ? 1.0 : 0.0)) * radius_ * m;
    }
    return v;
}

double LpBall::gauge(const Vec& w, double) const {
    check_input(w, dim_);
    return norm_p(w, p_) / radius_;
}

bool LpBall::membership(const Vec& w, double tol) const {
    check_input(w, dim_);
    return norm_p(w, p_) <= radius_ * (1.0 + tol);
}

std::string LpBall::describe() const {
    return "lp:p=" + std::to_string(p_) + ",r=" + std::to_string(radius_) +
           ",d=" + std::to_string(dim_);
}

// ---------------------------------------------------------------------------
// Polytope

namespace {

// Andrew monotone chain, CCW hull. Input points must have d = 2.
std::vector<Vec> convex_hull_2d(std::vector<Vec> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    if (pts.size() < 3) return pts;
    std::vector<Vec> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

// outward edge normals and offsets (<n, x> <= b) of the 2-d hull; offsets are
// the origin-edge distances, so min(b) is the inner radius
struct HullEdges2d {
    std::vector<Vec> normals;
    std::vector<double> offsets;
    double inner_radius = -1.0;
};

HullEdges2d hull_edges_2d(const std::vector<Vec>& vertices) {
    HullEdges2d out;
    auto hull = convex_hull_2d(vertices);
    if (hull.size() < 3) return out;
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec& a = hull[i];
        const Vec& b = hull[(i + 1) % hull.size()];
        const double ex = b[0] - a[0], ey = b[1] - a[1];
        const double len = std::hypot(ex, ey);
        if (len == 0.0) continue;
        // CCW hull: (ey, -ex) points outward
        Vec n{ey / len, -ex / len};
        const double off = n[0] * a[0] + n[1] * a[1];
        r = std::min(r, off);
        out.normals.push_back(std::move(n));
        out.offsets.push_back(off);
    }
    out.inner_radius = r;
    return out;
}

}  // namespace

Polytope::Polytope(std::vector<Vec> vertices, double declared_r)
    : Body(vertices.empty() ? 0 : vertices.front().size(), BodySandwich{}, 0.0),
      vertices_(std::move(vertices)) {
    require(!vertices_.empty(), "polytope: empty vertex list");
    for (const auto& v : vertices_) {
        require(v.size() == dim_, "polytope: inconsistent vertex dimensions");
        require(all_finite(v), "polytope: non-finite vertex");
    }
    double R = 0.0;
    for (const auto& v : vertices_) R = std::max(R, norm2(v));
    require(R > 0.0, "polytope: degenerate vertex set");

    // axis-aligned box detection: 2^d vertices, all sign patterns of fixed
    // per-coordinate half-widths
    if (dim_ <= 20 && vertices_.size() == (std::size_t{1} << dim_)) {
        Vec hw(dim_, 0.0);
        for (std::size_t j = 0; j < dim_; ++j) hw[j] = std::abs(vertices_.front()[j]);
        bool box = true;
        for (const auto& v : vertices_)
            for (std::size_t j = 0; j < dim_; ++j)
                if (std::abs(std::abs(v[j]) - hw[j]) > 0.0) box = false;
        if (box) {
            std::vector<std::uint32_t> seen;
            for (const auto& v : vertices_) {
                std::uint32_t mask = 0;
                for (std::size_t j = 0; j < dim_; ++j)
                    if (v[j] > 0.0) mask |= (1u << j);
                seen.push_back(mask);
            }
            std::sort(seen.begin(), seen.end());
            seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
            box = seen.size() == vertices_.size();
            for (double h : hw) box = box && h > 0.0;
            if (box) {
                is_box_ = true;
                box_halfwidths_ = hw;
            }
        }
    }

    double r = declared_r;
    if (dim_ == 2) {
        auto edges = hull_edges_2d(vertices_);
        hull_normals_ = std::move(edges.normals);
        hull_offsets_ = std::move(edges.offsets);
        if (r <= 0.0) r = edges.inner_radius;
    } else if (r <= 0.0 && is_box_) {
        r = *std::min_element(box_halfwidths_.begin(), box_halfwidths_.end());
    } else if (r <= 0.0) {
        throw std::invalid_argument(
            "polytope: inner radius is only derived for boxes and d=2; pass r= explicitly");
    }
    require(r > 1e-12 * R, "polytope: origin not strictly inside");
    sandwich_ = BodySandwich{r, R, R / r};
}

Vec Polytope::lin_min(const Vec& g) const {
    check_input(g, dim_);
    if (is_zero(g)) return zeros(dim_);
    // storage-order scan, strictly-better updates only: deterministic tie-break
    std::size_t best = 0;
    double best_val = dot(vertices_[0], g);
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        const double v = dot(vertices_[i], g);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    return vertices_[best];
}

double Polytope::hull_distance_sq(const Vec& w, double gap_tol) const {
    check_input(w, dim_);
    // Frank-Wolfe with away steps on min ||sum_i lambda_i v_i - w||^2 over the
    // simplex; the FW gap upper-bounds the suboptimality of the iterate.
    std::vector<double> lambda(vertices_.size(), 0.0);
    lambda[0] = 1.0;
    Vec x = vertices_[0];
    const int max_iter = 20000;
    for (int it = 0; it < max_iter; ++it) {
        Vec grad = sub(x, w);  // 1/2 gradient
        std::size_t s = 0, a = 0;
        double s_val = std::numeric_limits<double>::infinity();
        double a_val = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            const double v = dot(grad, vertices_[i]);
            if (v < s_val) {
                s_val = v;
                s = i;
            }
            if (lambda[i] > 0.0 && v > a_val) {
                a_val = v;
                a = i;
            }
        }
        const double gap = 2.0 * (dot(grad, x) - s_val);
        if (gap <= gap_tol) break;
        // choose the better of the FW and away directions
        Vec dir;
        double step_max;
        bool away = (a_val - dot(grad, x)) > (dot(grad, x) - s_val);
        if (away) {
            dir = sub(x, vertices_[a]);
            step_max = lambda[a] / (1.0 - lambda[a] + 1e-300);
        } else {
            dir = sub(vertices_[s], x);
            step_max = 1.0;
        }
        const double denom = dot(dir, dir);
        if (denom <= 0.0) break;
        double step = -dot(grad, dir) / denom;
        step = std::clamp(step, 0.0, step_max);
        if (step <= 0.0) break;
        if (away) {
            for (std::size_t i = 0; i < lambda.size(); ++i) lambda[i] *= (1.0 + step);
            lambda[a] -= step;
            if (lambda[a] < 1e-15) lambda[a] = 0.0;
        } else {
            for (std::size_t i = 0; i < lambda.size(); ++i) lambda[i] *= (1.0 - step);
            lambda[s] += step;
        }
        axpy(x, step, dir);
        if (!away && step == 1.0) {
            std::fill(lambda.begin(), lambda.end(), 0.0);
            lambda[s] = 1.0;
            x = vertices_[s];
        }
    }
    return dist2(x, w);
}

bool Polytope::membership(const Vec& w, double tol) const {
    check_input(w, dim_);
    if (is_box_) {
        for (std::size_t j = 0; j < dim_; ++j)
            if (std::abs(w[j]) > box_halfwidths_[j] * (1.0 + tol)) return false;
        return true;
    }
    if (dim_ == 2) return gauge(w) <= 1.0 + tol;
    const double slack = sandwich_.r * tol + 1e-12 * (sandwich_.R + norm2(w));
    return hull_distance_sq(w, 0.25 * slack * slack) <= slack * slack;
}

double Polytope::gauge(const Vec& w, double tol) const {
    check_input(w, dim_);
    if (is_zero(w)) return 0.0;
    if (is_box_) {
        double m = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) m = std::max(m, std::abs(w[j]) / box_halfwidths_[j]);
        return m;
    }
    if (dim_ == 2) {
        // exact from the facet representation
        double m = 0.0;
        for (std::size_t e = 0; e < hull_normals_.size(); ++e)
            m = std::max(m, dot(hull_normals_[e], w) / hull_offsets_[e]);
        return m;
    }
    // bisection on lambda with the membership test; bracket from the sandwich
    const double n = norm2(w);
    double lo = n / sandwich_.R, hi = n / sandwich_.r;
    if (membership(scaled(w, 1.0 / lo), 0.0)) return lo;
    const double mem_tol = std::min(tol, 1e-10);
    for (int it = 0; it < 60 && hi - lo > 0.25 * tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (membership(scaled(w, 1.0 / mid), mem_tol))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

std::optional<Vec> Polytope::polar_project_closed_form(const Vec& w, double scale) const {
    if (!is_box_) return std::nullopt;
    // polar of a box is the weighted l1 ball {u : sum_j a_j |u_j| <= 1};
    // project by soft-thresholding with the multiplier found by bisection
    const Vec& a = box_halfwidths_;
    double g = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) g += a[j] * std::abs(w[j]);
    if (g <= scale) return w;
    double lo = 0.0, hi = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) hi = std::max(hi, std::abs(w[j]) / a[j]);
    const auto weighted_sum = [&](double nu) {
        double s = 0.0;
        for (std::size_t j = 0; j < dim_; ++j)
            s += a[j] * std::max(std::abs(w[j]) - nu * a[j], 0.0);
        return s;
    };
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (weighted_sum(mid) > scale)
            lo = mid;
        else
            hi = mid;
    }
    const double nu = 0.5 * (lo + hi);
    Vec u(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
        const double m = std::max(std::abs(w[j]) - nu * a[j], 0.0);
        u[j] = (w[j] > 0.0 ? 1.0 : (w[j] < 0.0 ? -1.0 : 0.0)) * m;
    }
    // guard against the multiplier bisection stopping a hair short
    double gu = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) gu += a[j] * std::abs(u[j]);
    if (gu > scale) u = scaled(u, scale / gu);
    return u;
}

std::string Polytope::describe() const {
    return "poly:m=" + std::to_string(vertices_.size()) + ",d=" + std::to_string(dim_) +
           (is_box_ ? ",box" : "");
}

// ---------------------------------------------------------------------------
// free functions

SupportResult support(const Body& body, const Vec& w) {
    Vec arg = body.lin_min(scaled(w, -1.0));
    return SupportResult{dot(arg, w), std::move(arg)};
}

namespace {

bool strong_convexity_samples(const std::function<double(const Vec&)>& gauge_fn,
                              std::size_t dim, double mu, int n_samples,
                              std::uint64_t seed) {
    Rng rng(seed);
    for (int i = 0; i < n_samples; ++i) {
        Vec dx = rng.unit_vector(dim);
        Vec dy = rng.unit_vector(dim);
        const double gx = gauge_fn(dx), gy = gauge_fn(dy);
        if (gx <= 0.0 || gy <= 0.0) return false;
        Vec x = scaled(dx, 1.0 / gx);
        Vec y = scaled(dy, 1.0 / gy);
        const double theta = rng.uniform();
        const double d2 = dist2(x, y);
        const double vnorm = mu * theta * (1.0 - theta) * d2 / 2.0;
        Vec p = add(scaled(x, theta), scaled(y, 1.0 - theta));
        axpy(p, vnorm, rng.unit_vector(dim));
        if (gauge_fn(p) > 1.0 + 1e-9) return false;
    }
    return true;
}

}  // namespace

bool verify_strong_convexity(const Body& body, double mu, int n_samples, std::uint64_t seed) {
    if (mu <= 0.0) throw std::invalid_argument("verify_strong_convexity: mu must be > 0");
    if (n_samples < 1) throw std::invalid_argument("verify_strong_convexity: n_samples >= 1");
    return strong_convexity_samples([&](const Vec& w) { return body.gauge(w, 1e-12); },
                                    body.dim(), mu, n_samples, seed);
}

bool verify_strong_convexity_gauge(const std::function<double(const Vec&)>& gauge_fn,
                                   std::size_t dim, double mu, int n_samples,
                                   std::uint64_t seed) {
    if (mu <= 0.0) throw std::invalid_argument("verify_strong_convexity: mu must be > 0");
    if (n_samples < 1) throw std::invalid_argument("verify_strong_convexity: n_samples >= 1");
    return strong_convexity_samples(gauge_fn, dim, mu, n_samples, seed);
}

bool support_lipschitz_check(const Body& body, double mu, const Vec& x, const Vec& y) {
    if (mu <= 0.0) throw std::invalid_argument("support_lipschitz_check: mu must be > 0");
    if (is_zero(x) || is_zero(y))
        throw std::invalid_argument("support_lipschitz_check: x and y must be nonzero");
    const Vec u = support(body, x).argmax;
    const Vec v = support(body, y).argmax;
    const double lhs = norm2(sub(u, v));
    const double rhs = 2.0 * norm2(sub(x, y)) / (mu * (norm2(x) + norm2(y)));
    return lhs <= rhs + 1e-9;
}

// ---------------------------------------------------------------------------
// config-string construction

std::shared_ptr<const Body> parse_body(const std::string& spec) {
    const auto colon = spec.find(':');
    require(colon != std::string::npos, "body spec needs the form kind:opts, got: " + spec);
    const std::string kind = spec.substr(0, colon);
    auto kv = parse_kv(spec.substr(colon + 1));
    const auto get = [&](const std::string& key, double fallback) {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : std::stod(it->second);
    };
    if (kind == "ball") {
        require(kv.count("R") == 1, "ball spec needs R=");
        const auto d = static_cast<std::size_t>(get("d", 2));
        return std::make_shared<EuclideanBall>(d, get("R", 1.0));
    }
    if (kind == "lp") {
        require(kv.count("p") == 1 && kv.count("r") == 1, "lp spec needs p= and r=");
        const auto d = static_cast<std::size_t>(get("d", 2));
        return std::make_shared<LpBall>(d, get("p", 1.5), get("r", 1.0), get("mu", -1.0));
    }
    if (kind == "poly") {
        require(kv.count("file") == 1, "poly spec needs file=");
        std::ifstream in(kv["file"]);
        require(in.good(), "poly: cannot open " + kv["file"]);
        std::vector<Vec> verts;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            Vec v;
            std::stringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
            verts.push_back(std::move(v));
        }
        return std::make_shared<Polytope>(std::move(verts), get("r", -1.0));
    }
    throw std::invalid_argument("unknown body kind: " + kind);
}

}  // namespace oco
