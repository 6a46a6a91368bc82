#include "oco/harness.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "oco/rng.hpp"

namespace oco {

namespace {

std::map<std::string, std::string> parse_opts(const std::string& spec, std::string& kind) {
    std::map<std::string, std::string> kv;
    const auto colon = spec.find(':');
    kind = spec.substr(0, colon);
    if (colon == std::string::npos) return kv;
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("malformed option: " + item);
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return kv;
}

double opt_or(const std::map<std::string, std::string>& kv, const std::string& key,
              double fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stod(it->second);
}

std::string opt_or(const std::map<std::string, std::string>& kv, const std::string& key,
                   const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

Vec clip_to_norm(Vec g, double L) {
    const double n = norm2(g);
    if (n > L) return scaled(g, L / n);
    return g;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// adversaries

namespace {

class IidSphere final : public Adversary {
  public:
    IidSphere(std::size_t d, double L, std::uint64_t seed) : d_(d), L_(L), rng_(seed) {}
    Vec next(const Vec&) override { return scaled(rng_.unit_vector(d_), L_); }

  private:
    std::size_t d_;
    double L_;
    Rng rng_;
};

// adaptive: pushes straight against the current play so that <g_t, x_t> >= 0
class SignFlip final : public Adversary {
  public:
    SignFlip(std::size_t d, double L) : d_(d), L_(L) {}
    Vec next(const Vec& x) override {
        ++t_;
        const double n = norm2(x);
        if (n > 0.0) return scaled(x, L_ / n);
        Vec g = zeros(d_);
        g[0] = (t_ % 2 == 0 ? -L_ : L_);
        return g;
    }

  private:
    std::size_t d_;
    double L_;
    long t_ = 0;
};

// quadratic pulls toward a slowly rotating target
class SmoothQuad final : public Adversary {
  public:
    SmoothQuad(std::size_t d, double L, std::uint64_t seed, double amplitude)
        : d_(d), L_(L), amp_(amplitude) {
        Rng rng(seed);
        phase_ = rng.uniform(0.0, 6.283185307179586);
        omega_ = rng.uniform(0.02, 0.2);
    }
    Vec next(const Vec& x) override {
        ++t_;
        Vec a = zeros(d_);
        a[0] = amp_ * std::cos(omega_ * t_ + phase_);
        if (d_ > 1) a[1] = amp_ * std::sin(omega_ * t_ + phase_);
        Vec g = sub(x, a);
        return clip_to_norm(scaled(g, 2.0), L_);
    }

  private:
    std::size_t d_;
    double L_;
    double amp_;
    double phase_, omega_;
    long t_ = 0;
};

// fixed mean direction plus noise; keeps the gradient-sum norm growing
class BiasedDrift final : public Adversary {
  public:
    BiasedDrift(std::size_t d, double L, std::uint64_t seed, double bias, double noise)
        : d_(d), L_(L), bias_(bias), noise_(noise), rng_(seed) {
        dir_ = rng_.unit_vector(d_);
    }
    Vec next(const Vec&) override {
        Vec g = scaled(dir_, bias_ * L_);
        axpy(g, noise_ * L_, rng_.ball_point(d_));
        return clip_to_norm(std::move(g), L_);
    }

  private:
    std::size_t d_;
    double L_;
    double bias_, noise_;
    Rng rng_;
    Vec dir_;
};

}  // namespace

std::unique_ptr<Adversary> parse_adversary(const std::string& spec, std::size_t dim, double L,
                                           std::uint64_t seed) {
    std::string kind;
    auto kv = parse_opts(spec, kind);
    if (kind == "iid-sphere") return std::make_unique<IidSphere>(dim, L, seed);
    if (kind == "sign-flip") return std::make_unique<SignFlip>(dim, L);
    if (kind == "smooth-quad")
        return std::make_unique<SmoothQuad>(dim, L, seed, opt_or(kv, "amp", 0.5));
    if (kind == "biased-drift")
        return std::make_unique<BiasedDrift>(dim, L, seed, opt_or(kv, "bias", 0.6),
                                             opt_or(kv, "noise", 0.35));
    throw std::invalid_argument("unknown adversary: " + kind);
}

// ---------------------------------------------------------------------------
// parameter resolution and learner construction

namespace {

double resolve_eps(const std::string& spec, double kappa, long T) {
    if (spec != "auto") return std::stod(spec);
    const double e = 1.0 / (std::pow(kappa, 4.0 / 3.0) * std::cbrt(static_cast<double>(T)));
    return std::min(e, 0.999);
}

double resolve_delta(const std::string& spec, double rho, double eps, double kappa, long T) {
    if (spec != "auto") return std::stod(spec);
    const double log_delta = std::log(rho) + 16.0 * std::log(eps) - 16.0 * std::log(484.0) -
                             std::log(static_cast<double>(T)) - 128.0 * std::log(kappa);
    return std::max(std::exp(log_delta), 1e-12);
}

struct BuiltLearner {
    std::unique_ptr<Learner> learner;
    bool constrained = true;  // membership-audited against the body
};

// plays the scalar parameter-free learner as an unconstrained 1-d learner
class FreeGradLearner final : public Learner {
  public:
    explicit FreeGradLearner(double L) : fg_(L) {}
    Vec next() const override { return Vec{fg_.next()}; }
    void feed(const Vec& g) override {
        if (g.size() != 1) throw std::invalid_argument("freegrad learner is 1-d");
        fg_.feed(g[0]);
    }

  private:
    FreeGrad1d fg_;
};

BuiltLearner build_learner(const ExperimentConfig& cfg, std::shared_ptr<const Body> body,
                           CountingOracle& oracle, ResolvedParams& rp) {
    const auto& sw = body->sandwich();
    const long T = cfg.T;
    const double L = cfg.L;
    std::string kind;
    auto kv = parse_opts(cfg.learner, kind);

    const auto eta_auto_main = [&] {
        const double v = std::sqrt(std::log(static_cast<double>(T))) /
                         (sw.R * L * std::sqrt(static_cast<double>(T)));
        return v > 0.0 ? v : 1.0 / (2.0 * sw.R * L * std::sqrt(static_cast<double>(T)));
    };
    const auto eta_auto_ftal = [&] {
        return 1.0 / (L * sw.R * std::sqrt(static_cast<double>(T)));
    };

    if (kind == "ftl") return {std::make_unique<FtlLearner>(oracle), true};
    if (kind == "freegrad") {
        if (body->dim() != 1)
            throw std::invalid_argument("freegrad learner requires a 1-d body");
        return {std::make_unique<FreeGradLearner>(L), false};
    }
    if (kind == "ftsl") return {make_ftsl(oracle, L), true};
    if (kind == "ogd") {
        double step = opt_or(kv, "step", -1.0);
        if (step <= 0.0) step = sw.R / (L * std::sqrt(static_cast<double>(std::max(T, 1L))));
        rp.eta = step;
        return {std::make_unique<OgdLearner>(oracle, step), true};
    }
    if (kind == "ftal") {
        rp.eps = resolve_eps(opt_or(kv, "eps", cfg.eps), sw.kappa, T);
        rp.delta = resolve_delta(opt_or(kv, "delta", cfg.delta), cfg.rho, rp.eps, sw.kappa, T);
        EpsBody eb(body, rp.eps);
        rp.mu = eb.mu_eps();
        return {make_ftal(eb, oracle, rp.delta), true};
    }
    if (kind == "main") {
        const std::string base = opt_or(kv, "base", std::string("ftl"));
        MainAlg::Params p;
        p.L = L;
        p.R = sw.R;
        p.T = std::max(T, 1L);
        if (base == "ftl") {
            p.mu = cfg.mu == "auto" ? body->strong_convexity() : std::stod(cfg.mu);
            if (!(p.mu > 0.0))
                throw std::invalid_argument(
                    "main: body has no declared strong convexity; pass --mu");
            p.eta = cfg.eta == "auto" ? eta_auto_main() : std::stod(cfg.eta);
            rp.mu = p.mu;
            rp.eta = p.eta;
            auto factory = [&oracle, L]() -> std::unique_ptr<Learner> {
                return make_ftsl(oracle, L);
            };
            return {std::make_unique<MainAlg>(body->dim(), p, factory), true};
        }
        if (base == "ftal") {
            rp.eps = resolve_eps(opt_or(kv, "eps", cfg.eps), sw.kappa, T);
            rp.delta =
                resolve_delta(opt_or(kv, "delta", cfg.delta), cfg.rho, rp.eps, sw.kappa, T);
            EpsBody eb(body, rp.eps);
            p.mu = cfg.mu == "auto" ? eb.mu_eps() : std::stod(cfg.mu);
            p.eta = cfg.eta == "auto" ? eta_auto_ftal() : std::stod(cfg.eta);
            rp.mu = p.mu;
            rp.eta = p.eta;
            const double delta = rp.delta;
            const double scalar_scale = sw.R * L;
            auto factory = [eb, &oracle, delta, L, scalar_scale]() -> std::unique_ptr<Learner> {
                return std::make_unique<CaWrapper>(make_ftal(eb, oracle, delta), L,
                                                   scalar_scale);
            };
            return {std::make_unique<MainAlg>(body->dim(), p, factory), true};
        }
        throw std::invalid_argument("main: unknown base learner: " + base);
    }
    throw std::invalid_argument("unknown learner: " + kind);
}

}  // namespace

// ---------------------------------------------------------------------------
// experiment loop

Vec best_comparator(const Body& body, const Vec& grad_sum) { return body.lin_min(grad_sum); }

RegretTrace run(const ExperimentConfig& cfg) {
    if (cfg.T < 0) throw std::invalid_argument("run: T must be >= 0");
    if (!(cfg.L > 0.0)) throw std::invalid_argument("run: L must be > 0");
    auto body = parse_body(cfg.body);
    CountingOracle oracle(body);
    RegretTrace trace;
    const auto& sw = body->sandwich();
    trace.resolved.r = sw.r;
    trace.resolved.R = sw.R;
    trace.resolved.kappa = sw.kappa;
    auto built = build_learner(cfg, body, oracle, trace.resolved);
    auto adversary = parse_adversary(cfg.adversary, body->dim(), cfg.L, cfg.seed);

    Vec grad_sum = zeros(body->dim());
    double cum_loss = 0.0;
    trace.rounds.reserve(static_cast<std::size_t>(cfg.T));
    for (long t = 1; t <= cfg.T; ++t) {
        Vec x = built.learner->next();
        if (built.constrained && !body->membership(x, 1e-9))
            throw std::runtime_error("membership violation at round " + std::to_string(t) +
                                     " (gauge " + format_double(body->gauge(x, 1e-12)) + ")");
        Vec g = adversary->next(x);
        if (norm2(g) > cfg.L * (1.0 + 1e-12))
            throw std::runtime_error("adversary produced ||g|| > L at round " +
                                     std::to_string(t));
        const double loss = dot(g, x);
        cum_loss += loss;
        axpy(grad_sum, 1.0, g);
        built.learner->feed(g);
        trace.rounds.push_back(
            RoundRecord{t, std::move(x), std::move(g), loss, cum_loss, oracle.loo_calls()});
    }
    trace.comparator = best_comparator(*body, grad_sum);
    trace.final_regret = cum_loss - dot(grad_sum, trace.comparator);
    trace.loo_total = oracle.loo_calls();
    trace.sep_total = oracle.sep_calls();

    if (!cfg.out.empty()) {
        emit_csv(trace, cfg.out + ".csv", cfg.prefix_comparators ? body.get() : nullptr);
        emit_json(trace, cfg, cfg.out + ".json");
    }
    return trace;
}

// ---------------------------------------------------------------------------
// regression and emission

FitResult fit_exponent(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("fit_exponent: need at least 3 points");
    FitResult out;
    std::vector<double> xs, ys;
    for (auto [T, regret] : points) {
        if (!(T > 0.0)) throw std::invalid_argument("fit_exponent: T must be positive");
        if (regret <= 0.0) {
            regret = 1e-9;
            out.floored = true;
            std::fprintf(stderr, "fit_exponent: warning: non-positive regret floored at 1e-9\n");
        }
        xs.push_back(std::log(T));
        ys.push_back(std::log(regret));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_exponent: needs at least two distinct T");
    out.slope = sxy / sxx;
    if (syy == 0.0) {
        out.r2 = 1.0;
    } else {
        const double ss_res = syy - sxy * sxy / sxx;
        out.r2 = 1.0 - ss_res / syy;
    }
    return out;
}

void emit_csv(const RegretTrace& trace, const std::string& path,
              const Body* prefix_comparator_body) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw std::runtime_error("cannot write " + path);
    out << "t,loss,cum_regret_vs_final_comparator,loo_calls";
    if (prefix_comparator_body) out << ",cum_regret_vs_prefix_comparator";
    out << '\n';
    Vec prefix = trace.comparator.empty() ? Vec{} : zeros(trace.comparator.size());
    for (const auto& row : trace.rounds) {
        axpy(prefix, 1.0, row.g);
        const double cum_regret = row.cum_loss - dot(prefix, trace.comparator);
        out << row.t << ',' << format_double(row.loss) << ',' << format_double(cum_regret)
            << ',' << row.loo_calls;
        if (prefix_comparator_body) {
            const Vec u = prefix_comparator_body->lin_min(prefix);
            out << ',' << format_double(row.cum_loss - dot(prefix, u));
        }
        out << '\n';
    }
    if (!out.good()) throw std::runtime_error("write failed for " + path);
}

namespace {

nlohmann::json config_json(const ExperimentConfig& cfg, const ResolvedParams& rp) {
    return nlohmann::json{{"body", cfg.body},
                          {"learner", cfg.learner},
                          {"adversary", cfg.adversary},
                          {"T", cfg.T},
                          {"L", cfg.L},
                          {"eta", cfg.eta},
                          {"mu", cfg.mu},
                          {"eps", cfg.eps},
                          {"delta", cfg.delta},
                          {"rho", cfg.rho},
                          {"seed", cfg.seed},
                          {"resolved",
                           {{"eta", rp.eta},
                            {"mu", rp.mu},
                            {"eps", rp.eps},
                            {"delta", rp.delta},
                            {"r", rp.r},
                            {"R", rp.R},
                            {"kappa", rp.kappa}}}};
}

}  // namespace

void emit_json(const RegretTrace& trace, const ExperimentConfig& cfg, const std::string& path) {
    nlohmann::json j;
    j["schema"] = 1;
    j["config"] = config_json(cfg, trace.resolved);
    j["final_regret"] = trace.final_regret;
    j["loo_calls_total"] = trace.loo_total;
    j["sep_calls_total"] = trace.sep_total;
    j["comparator"] = trace.comparator;
    j["rounds"] = trace.rounds.size();
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out.good()) throw std::runtime_error("write failed for " + path);
}

// ---------------------------------------------------------------------------
// sweeps

namespace {

void write_square_csv(const std::string& path, double halfwidth) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw std::runtime_error("cannot write " + path);
    const double a = halfwidth;
    out << format_double(a) << ',' << format_double(a) << '\n';
    out << format_double(a) << ',' << format_double(-a) << '\n';
    out << format_double(-a) << ',' << format_double(a) << '\n';
    out << format_double(-a) << ',' << format_double(-a) << '\n';
}

SweepReport sweep_grid(const std::string& preset, const std::string& body,
                       const std::string& learner, const std::vector<std::string>& adversaries,
                       const std::vector<long>& horizons, int n_seeds, int threads) {
    SweepReport report;
    report.preset = preset;
    for (const auto& adv : adversaries)
        for (long T : horizons)
            for (int s = 1; s <= n_seeds; ++s) {
                ExperimentConfig cfg;
                cfg.body = body;
                cfg.learner = learner;
                cfg.adversary = adv;
                cfg.T = T;
                cfg.seed = static_cast<std::uint64_t>(s);
                report.runs.push_back(SweepRun{cfg, 0.0, 0});
            }

    // independent runs over a small worker pool; each run owns its PRNG and
    // oracle, results land in their fixed slot
    const int n_threads =
        threads > 0 ? threads
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next_idx{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < n_threads; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next_idx.fetch_add(1);
                if (i >= report.runs.size()) return;
                auto trace = run(report.runs[i].config);
                report.runs[i].final_regret = trace.final_regret;
                report.runs[i].loo_total = trace.loo_total;
            }
        });
    for (auto& t : pool) t.join();

    for (const auto& adv : adversaries) {
        SweepFit fit;
        fit.adversary = adv;
        for (long T : horizons) {
            std::vector<double> regrets;
            for (const auto& r : report.runs)
                if (r.config.adversary == adv && r.config.T == T)
                    regrets.push_back(r.final_regret);
            std::sort(regrets.begin(), regrets.end());
            const std::size_t n = regrets.size();
            const double median = n % 2 == 1 ? regrets[n / 2]
                                             : 0.5 * (regrets[n / 2 - 1] + regrets[n / 2]);
            fit.medians.emplace_back(static_cast<double>(T), median);
        }
        fit.fit = fit_exponent(fit.medians);
        report.fits.push_back(std::move(fit));
    }
    return report;
}

}  // namespace

SweepReport run_sweep_preset(const std::string& preset, const std::string& out_dir,
                             int threads) {
    std::filesystem::create_directories(out_dir);
    const std::vector<long> grid_14 = {256, 512, 1024, 2048, 4096, 8192, 16384};
    const std::vector<long> grid_13 = {256, 512, 1024, 2048, 4096, 8192};
    SweepReport report;
    if (preset == "thm1-ball") {
        report = sweep_grid(preset, "ball:R=1.0,d=2", "main",
                            {"iid-sphere", "biased-drift"}, grid_14, 10, threads);
    } else if (preset == "thm2-square") {
        const std::string square = out_dir + "/square_d2.csv";
        write_square_csv(square, 1.0);
        report = sweep_grid(preset, "poly:file=" + square,
                            "main:base=ftal,eps=auto,delta=auto", {"iid-sphere"}, grid_13, 10,
                            threads);
    } else if (preset == "ftl-strong") {
        report = sweep_grid(preset, "ball:R=1.0,d=2", "ftl", {"biased-drift"}, grid_14, 10,
                            threads);
    } else if (preset == "freegrad-1d") {
        report = sweep_grid(preset, "ball:R=1.0,d=1", "freegrad", {"iid-sphere"}, grid_14, 10,
                            threads);
    } else {
        throw std::invalid_argument("unknown preset: " + preset);
    }
    emit_sweep_json(report, out_dir + "/" + preset + ".json");
    return report;
}

void emit_sweep_json(const SweepReport& report, const std::string& path) {
    nlohmann::json j;
    j["schema"] = 1;
    j["preset"] = report.preset;
    j["runs"] = nlohmann::json::array();
    for (const auto& r : report.runs) {
        j["runs"].push_back({{"body", r.config.body},
                             {"learner", r.config.learner},
                             {"adversary", r.config.adversary},
                             {"T", r.config.T},
                             {"seed", r.config.seed},
                             {"final_regret", r.final_regret},
                             {"loo_calls_total", r.loo_total}});
    }
    j["fits"] = nlohmann::json::array();
    for (const auto& f : report.fits) {
        nlohmann::json pts = nlohmann::json::array();
        for (auto [T, m] : f.medians) pts.push_back({{"T", T}, {"median_regret", m}});
        j["fits"].push_back({{"adversary", f.adversary},
                             {"slope", f.fit.slope},
                             {"r2", f.fit.r2},
                             {"points", pts}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out.good()) throw std::runtime_error("write failed for " + path);
}

}  // namespace oco
