#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "oco/vec.hpp"

namespace oco {

inline constexpr double kTol = 1e-9;

// Inner/outer ball radii of a feasible set and their ratio. All constants of
// the algorithms are expressed through these.
struct BodySandwich {
    double r = 0.0;      // B(r) is contained in the set
    double R = 0.0;      // the set is contained in B(R)
    double kappa = 0.0;  // R / r
};

// A closed convex set containing the origin in its interior, exposed through
// linear optimization, gauge and membership. Bodies are immutable after
// construction and safe to share across threads.
class Body {
  public:
    virtual ~Body() = default;

    std::size_t dim() const { return dim_; }
    const BodySandwich& sandwich() const { return sandwich_; }

    // Declared strong-convexity modulus w.r.t. the Euclidean norm;
    // 0 means "not declared strongly convex".
    double strong_convexity() const { return mu_; }

    // Exact minimizer of <v, g> over the body. Returns the origin when g = 0.
    // Ties broken deterministically (vertex storage order for polytopes).
    virtual Vec lin_min(const Vec& g) const = 0;

    // Gauge function: smallest lambda >= 0 with w in lambda * body,
    // within additive tol.
    virtual double gauge(const Vec& w, double tol = kTol) const = 0;

    // True iff gauge(w) <= 1 + tol. Closed-form bodies use exact norm tests.
    virtual bool membership(const Vec& w, double tol = kTol) const;

    // whether gauge() is a cheap closed form (balls, boxes) rather than an
    // iterative solve
    virtual bool gauge_closed_form() const { return true; }

    // Exact projection of w onto scale * (polar of the body), when a closed
    // form exists. std::nullopt means the caller must use an iterative solver.
    virtual std::optional<Vec> polar_project_closed_form(const Vec& w, double scale) const {
        (void)w;
        (void)scale;
        return std::nullopt;
    }

    virtual std::string describe() const = 0;

  protected:
    Body(std::size_t dim, BodySandwich sandwich, double mu)
        : dim_(dim), sandwich_(sandwich), mu_(mu) {}

    std::size_t dim_;
    BodySandwich sandwich_;
    double mu_;
};

class EuclideanBall final : public Body {
  public:
    explicit EuclideanBall(std::size_t dim, double radius);

    Vec lin_min(const Vec& g) const override;
    double gauge(const Vec& w, double tol = kTol) const override;
    bool membership(const Vec& w, double tol = kTol) const override;
    std::optional<Vec> polar_project_closed_form(const Vec& w, double scale) const override;
    std::string describe() const override;

    double radius() const { return radius_; }

  private:
    double radius_;
};

// lp-norm ball for p in (1, 2]. The modulus is declared (config-supplied or
// the (p-1)/r * d^{1/2-1/p} default) and validated by sampling, never derived.
class LpBall final : public Body {
  public:
    LpBall(std::size_t dim, double p, double radius, double declared_mu = -1.0);

    Vec lin_min(const Vec& g) const override;
    double gauge(const Vec& w, double tol = kTol) const override;
    bool membership(const Vec& w, double tol = kTol) const override;
    std::string describe() const override;

    double p() const { return p_; }
    double radius() const { return radius_; }

  private:
    double p_;
    double q_;  // dual exponent
    double radius_;
};

// Vertex-listed polytope, origin strictly inside. Axis-aligned boxes are
// detected at construction and served by closed forms; everything else goes
// through a distance-to-hull solver plus gauge bisection.
class Polytope final : public Body {
  public:
    // declared_r overrides the inner radius (required for non-box vertex
    // lists in dimension > 2, where it is not computed exactly).
    explicit Polytope(std::vector<Vec> vertices, double declared_r = -1.0);

    Vec lin_min(const Vec& g) const override;
    double gauge(const Vec& w, double tol = kTol) const override;
    bool membership(const Vec& w, double tol = kTol) const override;
    bool gauge_closed_form() const override { return is_box_ || dim_ == 2; }
    std::optional<Vec> polar_project_closed_form(const Vec& w, double scale) const override;
    std::string describe() const override;

    const std::vector<Vec>& vertices() const { return vertices_; }
    bool is_box() const { return is_box_; }

    // Squared Euclidean distance from w to the convex hull of the vertices
    // (Frank-Wolfe with away steps; certified by the duality gap).
    double hull_distance_sq(const Vec& w, double gap_tol) const;

  private:
    std::vector<Vec> vertices_;
    bool is_box_ = false;
    Vec box_halfwidths_;
    // 2-d facet representation (<n, x> <= b per hull edge): exact gauge and
    // membership without the iterative route
    std::vector<Vec> hull_normals_;
    std::vector<double> hull_offsets_;
};

// Support function value and its attaining point, via one lin_min call.
struct SupportResult {
    double value;
    Vec argmax;
};
SupportResult support(const Body& body, const Vec& w);

// Samples boundary pairs and curvature perturbations; true iff every sampled
// combination stays a member (tol 1e-9). Supports, does not prove, mu.
bool verify_strong_convexity(const Body& body, double mu, int n_samples, std::uint64_t seed);

// Same test against an arbitrary gauge (used for the strongly convexified
// approximation of a body, which is only available through its gauge).
bool verify_strong_convexity_gauge(const std::function<double(const Vec&)>& gauge_fn,
                                   std::size_t dim, double mu, int n_samples,
                                   std::uint64_t seed);

// Lipschitz property of the support mapping on strongly convex bodies:
// the support argmaxes u, v at x, y satisfy
// ||u - v|| <= 2 ||x - y|| / (mu (||x|| + ||y||)), checked with 1e-9 slack.
bool support_lipschitz_check(const Body& body, double mu, const Vec& x, const Vec& y);

// Body construction from a config string:
//   ball:R=1.0
//   lp:p=1.5,r=1.0[,mu=0.4]
//   poly:file=verts.csv[,r=0.5]   (CSV: one vertex per line)
std::shared_ptr<const Body> parse_body(const std::string& spec);

}  // namespace oco
