#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "oco/oracle.hpp"

namespace oco {

// Adaptive-learning-rate potential of the 1-d parameter-free learner:
//   psi_L(s, v) = ((2v + L|s|) L^2) / (2 (v + L|s|)^2 sqrt(Lv))
//                 * exp(|s|^2 / (2v + 2L|s|))
// Requires v > 0; callers keep the play at 0 until the first nonzero gradient.
double psi(double s, double v, double L);

// Online learner protocol: next() is idempotent between feeds and always
// returns a member of the learner's feasible set.
class Learner {
  public:
    virtual ~Learner() = default;
    virtual Vec next() const = 0;
    virtual void feed(const Vec& g) = 0;
};

// Follow-The-Leader: play the linear minimizer of the running gradient sum.
// Plays the origin (without an oracle call) whenever the sum vanishes.
class FtlLearner final : public Learner {
  public:
    explicit FtlLearner(CountingOracle& oracle);

    Vec next() const override { return play_; }
    void feed(const Vec& g) override;

    const Vec& grad_sum() const { return grad_sum_; }

  private:
    CountingOracle& oracle_;
    Vec grad_sum_;
    Vec play_;
};

// 1-d parameter-free learner with scale parameter L: after observing scalar
// gradients g_t with |g_t| <= L, plays z_{t+1} = -kappa G_t psi_L(G_t, V_t).
// kappa anchors the betting potential at wealth L when the first nonzero
// gradient arrives; without it the potential starts at L^{3/2}/|g_1| and the
// origin-regret guarantee degrades by that factor.
class FreeGrad1d {
  public:
    explicit FreeGrad1d(double L);

    double next() const { return z_; }
    void feed(double g);

    double scale() const { return L_; }
    double grad_sum() const { return G_; }
    double sq_sum() const { return V_; }
    double wealth_anchor() const { return kappa_; }

  private:
    double L_;
    double G_ = 0.0;
    double V_ = 0.0;
    double z_ = 0.0;
    double kappa_ = 1.0;
};

// Comparator-adaptive wrapper: scales the base learner's play w_t by the 1-d
// learner's bet z_t, feeding <w_t, g_t> to the scalar learner and g_t to the
// base. Played scale is clip(z_t, [0,1]) so the output stays in the body;
// the identity tests run with clipping disabled.
class CaWrapper final : public Learner {
  public:
    // scalar_scale bounds |<w_t, g_t>| and parameterizes the inner 1-d
    // learner; R*L for a body with outer radius R and gradient bound L.
    CaWrapper(std::unique_ptr<Learner> base, double grad_bound, double scalar_scale,
              bool clip_plays = true);

    Vec next() const override;
    void feed(const Vec& g) override;

    double current_z() const { return oned_.next(); }
    Vec current_base_play() const { return base_->next(); }

  private:
    std::unique_ptr<Learner> base_;
    FreeGrad1d oned_;
    double grad_bound_;
    bool clip_plays_;
};

// Follow-The-Scaled-Leader: the wrapper around FTL. First play is the origin.
std::unique_ptr<CaWrapper> make_ftsl(CountingOracle& oracle, double grad_bound);

// Two-expert sleeping-experts algorithm: mixes an anchor wrapper instance
// started at round 1 with a restartable instance, restarting the latter
// whenever the clipped-gradient sum is small relative to the energy.
class MainAlg final : public Learner {
  public:
    struct Params {
        double L;    // gradient norm bound
        double eta;  // mixing learning rate
        double mu;   // strong-convexity modulus of the feasible set
        double R;    // outer radius
        long T;      // horizon (the restart rule uses ln T)
    };

    MainAlg(std::size_t dim, Params params, std::function<std::unique_ptr<Learner>()> base);

    Vec next() const override;
    void feed(const Vec& g) override;

    long tau() const { return tau_; }
    double q() const { return q_; }
    double cum_anchor() const { return U_; }     // U_t
    double cum_restart() const { return W_; }    // W_t
    double cum_play() const { return S_; }       // S_t
    long round() const { return round_; }
    long restarts() const { return restarts_; }
    Vec restart_play() const { return restart_->next(); }

  private:
    std::size_t dim_;
    Params p_;
    std::function<std::unique_ptr<Learner>()> base_factory_;
    std::unique_ptr<Learner> anchor_;   // started at round 1
    std::unique_ptr<Learner> restart_;  // started at round tau
    long tau_ = 1;
    double q_ = 0.5;
    double U_ = 0.0, W_ = 0.0, S_ = 0.0;
    Vec clipped_sum_;
    double clipped_sq_ = 0.0;
    long round_ = 0;
    long restarts_ = 0;
};

// Sleeping-experts reduction over a Hedge base: plays awake-renormalized
// weights and feeds surrogate losses (asleep experts receive the mixture).
class SleepingExperts {
  public:
    SleepingExperts(int n_experts, double eta);

    // current Hedge weights pi_t on the full simplex
    Vec weights() const;

    // plays p_t from the awake mask, observes the loss vector, updates the
    // base; returns p_t. Throws if every expert is asleep.
    Vec step(const std::vector<std::uint8_t>& awake, const Vec& losses);

  private:
    int n_;
    double eta_;
    Vec cum_;  // cumulative surrogate losses
};

// Projected online gradient descent baseline.
class OgdLearner final : public Learner {
  public:
    OgdLearner(CountingOracle& oracle, double step_size, double projection_tol = 1e-7);

    Vec next() const override { return x_; }
    void feed(const Vec& g) override;

  private:
    CountingOracle& oracle_;
    double step_;
    double proj_tol_;
    Vec x_;
};

}  // namespace oco
