#include "oco/approx_set.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>

#include "oco/rng.hpp"

namespace oco {

EpsBody::EpsBody(std::shared_ptr<const Body> base, double eps)
    : base_(std::move(base)), eps_(eps) {
    if (!base_) throw std::invalid_argument("eps body: null base");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("eps body: eps must lie in (0,1)");
    const auto& sw = base_->sandwich();
    // the squared gauge is midpoint-strongly convex with modulus eps/r^2,
    // which yields eps (not 2 eps) in the set modulus; the doubled constant
    // fails the sampling verifier on square bases
    mu_eps_ = eps_ / (sw.r * std::sqrt(1.0 + eps_ * sw.kappa * sw.kappa));
}

double EpsBody::gauge_eps(const Vec& u) const {
    const double g = base_->gauge(u, 1e-12);
    const double n = norm2(u);
    const double r = base_->sandwich().r;
    return std::sqrt((1.0 - eps_) * g * g + eps_ * n * n / (r * r));
}

ThetaValue theta_eval(const EpsBody& eb, CountingOracle& oracle, double gamma, const Vec& w,
                      double delta) {
    if (gamma < 0.0) throw std::invalid_argument("theta_eval: gamma must be >= 0");
    const auto& sw = eb.base().sandwich();
    const double r2_over_eps = sw.r * sw.r / eb.eps();
    if (gamma == 0.0) return ThetaValue{r2_over_eps * dot(w, w), zeros(w.size())};
    const double b = std::max(gamma, sw.R * norm2(w));
    Vec u = project_scaled_polar(oracle, w, gamma, eb.eps(), eb.eps() * delta, b);
    Vec diff = scaled(u, gamma);
    axpy(diff, -1.0, w);
    return ThetaValue{gamma * gamma + r2_over_eps * dot(diff, diff), std::move(u)};
}

double theta_grad(const EpsBody& eb, CountingOracle& oracle, double gamma, const Vec& w,
                  double delta) {
    if (!(gamma > 0.0)) throw std::invalid_argument("theta_grad: gamma must be > 0");
    const auto& sw = eb.base().sandwich();
    const double b = std::max(gamma, sw.R * norm2(w));
    Vec u = project_scaled_polar(oracle, w, gamma, eb.eps(), eb.eps() * delta, b);
    Vec diff = scaled(u, gamma);
    axpy(diff, -1.0, w);
    return 2.0 * gamma + 2.0 * sw.r * sw.r / eb.eps() * dot(u, diff);
}

GoldenResult golden_section(const EpsBody& eb, CountingOracle& oracle, const Vec& w,
                            double delta) {
    const double wn = norm2(w);
    if (!(wn > 0.0)) throw std::invalid_argument("golden_section: w must be nonzero");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("golden_section: delta must be in (0,1)");
    const auto& sw = eb.base().sandwich();
    const double phi = (std::sqrt(5.0) + 1.0) / 2.0;
    const double log_phi = std::log(phi);
    // -log_{phi-1}(x) = ln(x) / ln(phi); the extra ln(1/eps) steps offset the
    // 1/eps factor in Theta's Lipschitz constant
    const double arg = (8.0 * sw.kappa * sw.kappa + 4.0 * sw.kappa) * wn * wn / delta;
    int k = static_cast<int>(std::ceil(std::log(arg) / log_phi)) +
            static_cast<int>(std::ceil(std::log(1.0 / eb.eps()) / log_phi));
    k = std::max(k, 1);
    const double inner_delta = delta / (4.0 * static_cast<double>(k) * phi);

    GoldenResult out;
    out.k = k;
    double lo = 0.0, hi = sw.R * wn;
    double probe_lo = hi - (hi - lo) / phi;
    double probe_hi = lo + (hi - lo) / phi;
    double val_lo = theta_eval(eb, oracle, probe_lo, w, inner_delta).value;
    double val_hi = theta_eval(eb, oracle, probe_hi, w, inner_delta).value;
    out.evaluations = 2;
    for (int i = 0; i < k; ++i) {
        if (val_lo < val_hi) {
            hi = probe_hi;
            probe_hi = probe_lo;
            val_hi = val_lo;
            probe_lo = hi - (hi - lo) / phi;
            if (i + 1 < k) {
                val_lo = theta_eval(eb, oracle, probe_lo, w, inner_delta).value;
                ++out.evaluations;
            }
        } else {
            lo = probe_lo;
            probe_lo = probe_hi;
            val_lo = val_hi;
            probe_hi = lo + (hi - lo) / phi;
            if (i + 1 < k) {
                val_hi = theta_eval(eb, oracle, probe_hi, w, inner_delta).value;
                ++out.evaluations;
            }
        }
    }
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    out.gamma_hat = 0.5 * (lo + hi);
    return out;
}

WeakLooResult weak_loo(const EpsBody& eb, CountingOracle& oracle, const Vec& w, double delta) {
    const std::size_t d = eb.base().dim();
    if (w.size() != d) throw std::invalid_argument("weak_loo: dimension mismatch");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("weak_loo: delta must be in (0,1)");
    const auto& sw = eb.base().sandwich();
    const double eps = eb.eps();
    const double kappa = sw.kappa;
    const bool hypothesis_ok =
        delta <= std::pow(eps, 4) / (std::pow(29.0, 4) * std::pow(kappa, 12));
    const double theta_nominal =
        1.0 + 576.0 * 576.0 * std::pow(delta, 0.25) * std::pow(kappa, 15) / (eps * eps);

    WeakLooResult out;
    out.theta_nominal = theta_nominal;
    out.delta_hypothesis_ok = hypothesis_ok;
    const double wn = norm2(w);
    if (wn == 0.0) {
        out.v_tilde = zeros(d);
        out.gamma_hat = 0.0;
        out.u_hat = zeros(d);
        out.z_hat = zeros(d);
        out.lambda_hat = 0.0;
        out.theta_applied = 1.0;
        return out;
    }
    const Vec wb = scaled(w, 1.0 / wn);

    out.gamma_hat = golden_section(eb, oracle, wb, delta).gamma_hat;
    out.u_hat = project_scaled_polar(oracle, wb, out.gamma_hat, eps, eps * delta, sw.R);
    out.z_hat = wb;
    axpy(out.z_hat, -out.gamma_hat, out.u_hat);
    out.lambda_hat = std::sqrt(out.gamma_hat * out.gamma_hat +
                               sw.r * sw.r / eps * dot(out.z_hat, out.z_hat));
    const double denom = dot(out.z_hat, wb);
    if (!(denom > 0.0))
        throw std::runtime_error("weak_loo: <z, w> is not positive; the projection residual "
                                 "degenerated");
    Vec v_hat = scaled(out.z_hat, out.lambda_hat / denom);

    // Deflate just enough to certify membership of the output; the nominal
    // worst-case constant is reported alongside.
    const double excess = eb.gauge_eps(v_hat);
    out.theta_applied = std::max(1.0, excess * (1.0 + 1e-12));
    out.v_tilde = scaled(v_hat, 1.0 / out.theta_applied);
    if (eb.gauge_eps(out.v_tilde) > 1.0 + 1e-6)
        throw std::runtime_error("weak_loo: output failed the membership check");
    return out;
}

namespace {

class FtalLearner final : public Learner {
  public:
    FtalLearner(EpsBody eb, CountingOracle& oracle, double delta)
        : eb_(std::move(eb)),
          oracle_(oracle),
          delta_(delta),
          grad_sum_(zeros(eb_.base().dim())),
          play_(zeros(eb_.base().dim())) {}

    Vec next() const override { return play_; }

    void feed(const Vec& g) override {
        axpy(grad_sum_, 1.0, g);
        if (is_zero(grad_sum_)) {
            play_ = zeros(grad_sum_.size());
            return;
        }
        // the weak LOO maximizes; minimizing the linear sum means negating it
        auto res = weak_loo(eb_, oracle_, scaled(grad_sum_, -1.0), delta_);
        static std::atomic<bool> warned_once{false};
        if (!res.delta_hypothesis_ok && !warned_once.exchange(true))
            std::fprintf(stderr,
                         "ftal: warning: delta=%g exceeds eps^4/(29^4 kappa^12); accuracy "
                         "guarantee is heuristic at this setting\n",
                         delta_);
        play_ = std::move(res.v_tilde);
    }

  private:
    EpsBody eb_;
    CountingOracle& oracle_;
    double delta_;
    Vec grad_sum_;
    Vec play_;
    bool warned_ = false;
};

}  // namespace

std::unique_ptr<Learner> make_ftal(const EpsBody& eb, CountingOracle& oracle, double delta) {
    return std::make_unique<FtalLearner>(eb, oracle, delta);
}

bool sandwich_check(const EpsBody& eb, int n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("sandwich_check: n_samples >= 1");
    Rng rng(seed);
    const auto& base = eb.base();
    const double outer = std::sqrt(1.0 + base.sandwich().kappa * base.sandwich().kappa * eb.eps());
    for (int i = 0; i < n_samples; ++i) {
        const Vec dir = rng.unit_vector(base.dim());
        const double ge = eb.gauge_eps(dir);
        const double gc = base.gauge(dir, 1e-12);
        if (!(ge > 0.0 && gc > 0.0)) return false;
        // inner: the gauge_eps boundary point lies in the base body
        if (!base.membership(scaled(dir, 1.0 / ge), 1e-8)) return false;
        // outer: the base boundary point has gauge_eps at most sqrt(1+kappa^2 eps)
        if (eb.gauge_eps(scaled(dir, 1.0 / gc)) > outer + 1e-8) return false;
    }
    return true;
}

}  // namespace oco
