#pragma once

#include <iosfwd>
#include <string>

#include "oco/approx_set.hpp"

namespace oco {

struct ExperimentConfig {
    std::string body = "ball:R=1.0";
    std::string learner = "ftl";
    std::string adversary = "iid-sphere";
    long T = 100;
    double L = 1.0;
    std::string eta = "auto";
    std::string mu = "auto";
    std::string eps = "auto";
    std::string delta = "auto";
    double rho = 0.05;
    std::uint64_t seed = 0;
    std::string out;  // output base path; empty = no emission
    // adds a CSV column with regret against the prefix-optimal comparator
    bool prefix_comparators = false;
};

// parameters after resolving every "auto" rule
struct ResolvedParams {
    double eta = 0.0;
    double mu = 0.0;
    double eps = 0.0;
    double delta = 0.0;
    double r = 0.0, R = 0.0, kappa = 0.0;
};

struct RoundRecord {
    long t;
    Vec x;
    Vec g;
    double loss;      // <g_t, x_t>
    double cum_loss;  // exact prefix sum
    std::uint64_t loo_calls;
};

struct RegretTrace {
    std::vector<RoundRecord> rounds;
    Vec comparator;          // hindsight-best for the full gradient sequence
    double final_regret = 0.0;
    std::uint64_t loo_total = 0;
    std::uint64_t sep_total = 0;
    ResolvedParams resolved;
};

// Gradient sources. Deterministic given the seed and the play history; every
// output has norm at most L.
class Adversary {
  public:
    virtual ~Adversary() = default;
    virtual Vec next(const Vec& x) = 0;
};
std::unique_ptr<Adversary> parse_adversary(const std::string& spec, std::size_t dim, double L,
                                           std::uint64_t seed);

// Runs one experiment; every played point is membership-audited against the
// body each round (tol 1e-9) and violations abort with the round index.
RegretTrace run(const ExperimentConfig& config);

// argmin over the body of <u, sum of gradients>; origin when the sum is zero
Vec best_comparator(const Body& body, const Vec& grad_sum);

struct FitResult {
    double slope = 0.0;
    double r2 = 0.0;
    bool floored = false;  // some regret values were non-positive and floored
};
// least-squares slope of log(regret) against log(T)
FitResult fit_exponent(const std::vector<std::pair<double, double>>& points);

void emit_csv(const RegretTrace& trace, const std::string& path,
              const Body* prefix_comparator_body = nullptr);
void emit_json(const RegretTrace& trace, const ExperimentConfig& config, const std::string& path);

struct SweepRun {
    ExperimentConfig config;
    double final_regret = 0.0;
    std::uint64_t loo_total = 0;
};

struct SweepFit {
    std::string adversary;
    std::vector<std::pair<double, double>> medians;  // (T, median regret)
    FitResult fit;
};

struct SweepReport {
    std::string preset;
    std::vector<SweepRun> runs;
    std::vector<SweepFit> fits;
};

// presets: thm1-ball, thm2-square, ftl-strong, freegrad-1d
SweepReport run_sweep_preset(const std::string& preset, const std::string& out_dir,
                             int threads = 0);
void emit_sweep_json(const SweepReport& report, const std::string& path);

// invariant suites behind the `verify` CLI subcommand:
// lemma2 lemma3 lemma4 lemma6 lemma7 eq18 weakloo2d gradcheck
bool verify_suite(const std::string& name, std::ostream& log);

// shortest round-trip decimal formatting (byte-stable output)
std::string format_double(double v);

}  // namespace oco
