#pragma once

#include "oco/learners.hpp"
#include "oco/projection.hpp"

namespace oco {

// Strongly convex approximation of a base body, defined through its gauge:
//   gauge_eps(u)^2 = (1 - eps) gauge_C(u)^2 + eps ||u||^2 / r^2.
// It is eps / (r sqrt(1 + eps kappa^2))-strongly convex and sandwiched as
// C_eps subset C subset sqrt(1 + kappa^2 eps) C_eps.
class EpsBody {
  public:
    EpsBody(std::shared_ptr<const Body> base, double eps);

    const Body& base() const { return *base_; }
    std::shared_ptr<const Body> base_ptr() const { return base_; }
    double eps() const { return eps_; }
    double mu_eps() const { return mu_eps_; }

    double gauge_eps(const Vec& u) const;
    bool membership_eps(const Vec& u, double tol) const { return gauge_eps(u) <= 1.0 + tol; }

  private:
    std::shared_ptr<const Body> base_;
    double eps_;
    double mu_eps_;
};

// One evaluation of the scalar objective
//   Theta(gamma) = gamma^2 + (r^2/eps) inf_{u in sqrt(1-eps) polar(C)} ||gamma u - w||^2,
// whose square-rooted minimum is the support of the approximate set.
// value is within r^2 * delta of the true Theta(gamma).
struct ThetaValue {
    double value;
    Vec projector;  // the approximate minimizing u
};
ThetaValue theta_eval(const EpsBody& eb, CountingOracle& oracle, double gamma, const Vec& w,
                      double delta);

// Derivative along the approximate projector:
//   Theta'(gamma) = 2 gamma + (2 r^2 / eps) <u, gamma u - w>.
double theta_grad(const EpsBody& eb, CountingOracle& oracle, double gamma, const Vec& w,
                  double delta);

struct GoldenResult {
    double gamma_hat;
    int k;                  // number of shrink steps
    double bracket_lo = 0;  // final bracket
    double bracket_hi = 0;
    int evaluations = 0;
};

// Golden-section search for the minimizer of Theta over [0, R ||w||];
// Theta(gamma_hat) lands within r^2 * delta of the infimum.
GoldenResult golden_section(const EpsBody& eb, CountingOracle& oracle, const Vec& w,
                            double delta);

struct WeakLooResult {
    Vec v_tilde;          // the returned point, a member of C_eps
    double gamma_hat;
    Vec u_hat;
    Vec z_hat;
    double lambda_hat;
    double theta_applied;  // deflation actually applied (measured normalization)
    double theta_nominal;  // the worst-case constant 1 + 576^2 delta^{1/4} kappa^15 / eps^2
    bool delta_hypothesis_ok;  // delta <= eps^4 / (29^4 kappa^12)
};

// Approximate maximizer of <v, w> over C_eps. w = 0 returns the origin.
WeakLooResult weak_loo(const EpsBody& eb, CountingOracle& oracle, const Vec& w, double delta);

// Follow-The-Approximate-Leader: FTL on C_eps with the weak LOO standing in
// for exact linear optimization (minimization exposed by negating the sum).
std::unique_ptr<Learner> make_ftal(const EpsBody& eb, CountingOracle& oracle, double delta);

// Samples directions and checks both sandwich inclusions with 1e-8 slack.
bool sandwich_check(const EpsBody& eb, int n_samples, std::uint64_t seed);

}  // namespace oco
