#include "oco/learners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "oco/projection.hpp"

namespace oco {

double psi(double s, double v, double L) {
    if (!(L > 0.0)) throw std::invalid_argument("psi: L must be > 0");
    if (!(v > 0.0)) throw std::domain_error("psi: v must be > 0");
    const double as = std::abs(s);
    const double num = (2.0 * v + L * as) * L * L;
    const double den = 2.0 * (v + L * as) * (v + L * as) * std::sqrt(L * v);
    return num / den * std::exp(as * as / (2.0 * v + 2.0 * L * as));
}

// ---------------------------------------------------------------------------
// FTL

FtlLearner::FtlLearner(CountingOracle& oracle)
    : oracle_(oracle),
      grad_sum_(zeros(oracle.body().dim())),
      play_(zeros(oracle.body().dim())) {}

void FtlLearner::feed(const Vec& g) {
    axpy(grad_sum_, 1.0, g);
    // zero sum: every point is an argmin, the convention picks the origin
    play_ = is_zero(grad_sum_) ? zeros(grad_sum_.size()) : oracle_.lin_min(grad_sum_);
}

// ---------------------------------------------------------------------------
// FreeGrad (1-d)

FreeGrad1d::FreeGrad1d(double L) : L_(L) {
    if (!(L > 0.0)) throw std::invalid_argument("freegrad: L must be > 0");
}

void FreeGrad1d::feed(double g) {
    if (std::abs(g) > L_ * (1.0 + 1e-12))
        throw std::invalid_argument("freegrad: |g| exceeds the scale parameter L");
    if (V_ == 0.0 && g != 0.0) {
        // ensure the betting potential L^2 exp(G^2/(2V+2L|G|)) / sqrt(LV)
        // opens at exactly L
        const double s = std::abs(g);
        kappa_ = s / std::sqrt(L_) * std::exp(-s / (2.0 * s + 2.0 * L_));
    }
    G_ += g;
    V_ += g * g;
    z_ = V_ > 0.0 ? -kappa_ * G_ * psi(G_, V_, L_) : 0.0;
}

// ---------------------------------------------------------------------------
// comparator-adaptive wrapper

CaWrapper::CaWrapper(std::unique_ptr<Learner> base, double grad_bound, double scalar_scale,
                     bool clip_plays)
    : base_(std::move(base)),
      oned_(scalar_scale),
      grad_bound_(grad_bound),
      clip_plays_(clip_plays) {
    if (!(grad_bound > 0.0)) throw std::invalid_argument("ca: gradient bound must be > 0");
}

Vec CaWrapper::next() const {
    const double z = clip_plays_ ? std::clamp(oned_.next(), 0.0, 1.0) : oned_.next();
    return scaled(base_->next(), z);
}

void CaWrapper::feed(const Vec& g) {
    if (norm2(g) > grad_bound_ * (1.0 + 1e-9))
        throw std::invalid_argument("ca: ||g|| exceeds the gradient bound");
    const Vec w = base_->next();
    double sigma = dot(w, g);
    if (clip_plays_) {
        // constraint-aware truncation: gradients the clip already absorbs are
        // not forwarded, which keeps the scalar regret bound valid against
        // every comparator in [0, 1]
        const double z = oned_.next();
        if ((z < 0.0 && sigma > 0.0) || (z > 1.0 && sigma < 0.0)) sigma = 0.0;
    }
    oned_.feed(sigma);
    base_->feed(g);
}

std::unique_ptr<CaWrapper> make_ftsl(CountingOracle& oracle, double grad_bound) {
    const double scalar_scale = oracle.body().sandwich().R * grad_bound;
    return std::make_unique<CaWrapper>(std::make_unique<FtlLearner>(oracle), grad_bound,
                                       scalar_scale);
}

// ---------------------------------------------------------------------------
// main two-expert algorithm

MainAlg::MainAlg(std::size_t dim, Params params, std::function<std::unique_ptr<Learner>()> base)
    : dim_(dim),
      p_(params),
      base_factory_(std::move(base)),
      anchor_(base_factory_()),
      restart_(base_factory_()),
      clipped_sum_(zeros(dim)) {
    if (!(p_.L > 0.0 && p_.eta > 0.0 && p_.mu > 0.0 && p_.R > 0.0 && p_.T >= 1))
        throw std::invalid_argument("main: parameters must be positive, T >= 1");
    if (2.0 * p_.R * p_.L * p_.eta > 1.0 + 1e-12)
        std::fprintf(stderr, "main: warning: 2*R*L*eta = %g > 1\n", 2.0 * p_.R * p_.L * p_.eta);
}

Vec MainAlg::next() const {
    Vec x = scaled(anchor_->next(), q_);
    axpy(x, 1.0 - q_, restart_->next());
    return x;
}

void MainAlg::feed(const Vec& g) {
    if (g.size() != dim_) throw std::invalid_argument("main: dimension mismatch");
    if (norm2(g) > p_.L * (1.0 + 1e-9))
        throw std::invalid_argument("main: ||g|| exceeds the gradient bound L");
    const long t = ++round_;

    const Vec u = anchor_->next();
    const Vec w = restart_->next();
    Vec x = scaled(u, q_);
    axpy(x, 1.0 - q_, w);

    const Vec gt = norm2(g) >= p_.L / static_cast<double>(t) ? g : zeros(dim_);
    anchor_->feed(gt);
    restart_->feed(gt);

    U_ += dot(gt, u);
    W_ += dot(gt, w);
    S_ += dot(gt, x);
    axpy(clipped_sum_, 1.0, gt);
    clipped_sq_ += dot(gt, gt);

    // restart rule; "0 <= 0" counts as satisfied
    const double lhs = p_.R * p_.mu * dot(clipped_sum_, clipped_sum_);
    const double rhs = clipped_sq_ * std::log(static_cast<double>(p_.T));
    if (lhs <= rhs) {
        tau_ = t + 1;
        restart_ = base_factory_();
        W_ = S_;
        ++restarts_;
    }

    // q_{t+1} = exp(-eta U) / (exp(-eta U) + exp(-eta W)), computed stably
    q_ = 1.0 / (1.0 + std::exp(-p_.eta * (W_ - U_)));
}

// ---------------------------------------------------------------------------
// sleeping experts

SleepingExperts::SleepingExperts(int n_experts, double eta)
    : n_(n_experts), eta_(eta), cum_(static_cast<std::size_t>(n_experts), 0.0) {
    if (n_experts < 1) throw std::invalid_argument("sleeping: need at least one expert");
    if (!(eta > 0.0)) throw std::invalid_argument("sleeping: eta must be > 0");
}

Vec SleepingExperts::weights() const {
    double m = cum_[0];
    for (double c : cum_) m = std::min(m, c);
    Vec pi(cum_.size());
    double z = 0.0;
    for (std::size_t k = 0; k < cum_.size(); ++k) {
        pi[k] = std::exp(-eta_ * (cum_[k] - m));
        z += pi[k];
    }
    for (double& p : pi) p /= z;
    return pi;
}

Vec SleepingExperts::step(const std::vector<std::uint8_t>& awake, const Vec& losses) {
    if (awake.size() != cum_.size() || losses.size() != cum_.size())
        throw std::invalid_argument("sleeping: awake/loss size mismatch");
    const Vec pi = weights();
    double z = 0.0;
    for (std::size_t k = 0; k < pi.size(); ++k)
        if (awake[k]) z += pi[k];
    if (z <= 0.0) throw std::invalid_argument("sleeping: every expert is asleep");
    Vec p(pi.size(), 0.0);
    for (std::size_t k = 0; k < pi.size(); ++k)
        if (awake[k]) p[k] = pi[k] / z;
    const double mixture = dot(p, losses);
    for (std::size_t k = 0; k < cum_.size(); ++k)
        cum_[k] += awake[k] ? losses[k] : mixture;
    return p;
}

// ---------------------------------------------------------------------------
// OGD baseline

OgdLearner::OgdLearner(CountingOracle& oracle, double step_size, double projection_tol)
    : oracle_(oracle), step_(step_size), proj_tol_(projection_tol),
      x_(zeros(oracle.body().dim())) {
    if (!(step_size > 0.0)) throw std::invalid_argument("ogd: step size must be > 0");
    if (!(projection_tol > 0.0)) throw std::invalid_argument("ogd: projection tol must be > 0");
}

void OgdLearner::feed(const Vec& g) {
    Vec y = x_;
    axpy(y, -step_, g);
    x_ = euclidean_project(oracle_, y, proj_tol_);
}

}  // namespace oco
