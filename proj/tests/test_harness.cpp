#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "oco/harness.hpp"
#include "oco/rng.hpp"

using namespace oco;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("empty horizon") {
    ExperimentConfig cfg;
    cfg.T = 0;
    cfg.learner = "ftl";
    auto trace = run(cfg);
    CHECK(trace.rounds.empty());
    CHECK(trace.final_regret == 0.0);
    CHECK(is_zero(trace.comparator));

    emit_csv(trace, "empty_trace.csv");
    CHECK(slurp("empty_trace.csv") == "t,loss,cum_regret_vs_final_comparator,loo_calls\n");
}

TEST_CASE("determinism: identical config and seed, byte-identical outputs") {
    for (const std::string learner : {"main", "ftsl", "ogd"}) {
        ExperimentConfig cfg;
        cfg.body = "ball:R=1.0,d=2";
        cfg.learner = learner;
        cfg.adversary = "iid-sphere";
        cfg.T = 10;
        cfg.seed = 77;
        cfg.out = "det_a_" + learner;
        run(cfg);
        cfg.out = "det_b_" + learner;
        run(cfg);
        CHECK(slurp("det_a_" + learner + ".csv") == slurp("det_b_" + learner + ".csv"));
        CHECK(slurp("det_a_" + learner + ".json") == slurp("det_b_" + learner + ".json"));
    }
}

TEST_CASE("ftl under a constant-direction adversary: one-round regret") {
    ExperimentConfig cfg;
    cfg.body = "ball:R=1.0,d=2";
    cfg.learner = "ftl";
    cfg.adversary = "biased-drift:bias=0.7,noise=0.0";
    cfg.T = 50;
    cfg.seed = 3;
    auto trace = run(cfg);
    // constant gradient g: w_t = -g/||g|| for t >= 2 equals the comparator,
    // so the regret collapses to the first round's <g, w_1 - u*>
    const Vec& g = trace.rounds.front().g;
    CHECK(trace.final_regret == doctest::Approx(norm2(g)).epsilon(1e-9));
    for (std::size_t t = 1; t < trace.rounds.size(); ++t)
        CHECK(norm2(sub(trace.rounds[t].x, trace.comparator)) < 1e-12);
}

TEST_CASE("best comparator") {
    EuclideanBall ball(2, 1.0);
    CHECK(norm2(sub(best_comparator(ball, {5.0, 0.0}), Vec{-1.0, 0.0})) < 1e-12);
    CHECK(is_zero(best_comparator(ball, zeros(2))));

    std::vector<Vec> verts = {{0.5, 0.5}, {0.5, -0.5}, {-0.5, 0.5}, {-0.5, -0.5}};
    Polytope sq(verts);
    CHECK(best_comparator(sq, {3.0, -1.0}) == Vec{-0.5, 0.5});
}

TEST_CASE("adversary gradients stay within the norm budget") {
    for (const std::string spec :
         {"iid-sphere", "sign-flip", "smooth-quad", "biased-drift"}) {
        auto adv = parse_adversary(spec, 3, 0.8, 99);
        Rng rng(1);
        for (int t = 0; t < 500; ++t) {
            Vec x = scaled(rng.unit_vector(3), rng.uniform(0.0, 1.0));
            CHECK(norm2(adv->next(x)) <= 0.8 + 1e-12);
        }
    }
    // iid-sphere gradients sit exactly on the sphere of radius L
    auto iid = parse_adversary("iid-sphere", 2, 1.0, 5);
    for (int t = 0; t < 100; ++t)
        CHECK(norm2(iid->next(zeros(2))) == doctest::Approx(1.0).epsilon(1e-12));
    // sign-flip never rewards the current play
    auto flip = parse_adversary("sign-flip", 2, 1.0, 5);
    Rng rng(2);
    for (int t = 0; t < 100; ++t) {
        Vec x = scaled(rng.unit_vector(2), rng.uniform(0.0, 1.0));
        CHECK(dot(flip->next(x), x) >= 0.0);
    }
    // smooth-quad with a zero-amplitude target and a play at the target
    auto quad = parse_adversary("smooth-quad:amp=0.0", 2, 1.0, 5);
    CHECK(is_zero(quad->next(zeros(2))));
}

TEST_CASE("fit_exponent") {
    std::vector<std::pair<double, double>> sqrt_pts, lin_pts;
    for (double T : {256.0, 512.0, 1024.0, 2048.0, 4096.0}) {
        sqrt_pts.emplace_back(T, std::sqrt(T));
        lin_pts.emplace_back(T, T);
    }
    auto f1 = fit_exponent(sqrt_pts);
    CHECK(f1.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f1.r2 == doctest::Approx(1.0).epsilon(1e-12));
    auto f2 = fit_exponent(lin_pts);
    CHECK(f2.slope == doctest::Approx(1.0).epsilon(1e-12));

    // 5% multiplicative noise around c T^{2/3}
    Rng rng(8);
    std::vector<std::pair<double, double>> noisy;
    for (double T : {256.0, 512.0, 1024.0, 2048.0, 4096.0, 8192.0, 16384.0})
        noisy.emplace_back(T, 3.0 * std::pow(T, 2.0 / 3.0) * (1.0 + 0.05 * (2.0 * rng.uniform() - 1.0)));
    auto f3 = fit_exponent(noisy);
    CHECK(f3.slope >= 0.6);
    CHECK(f3.slope <= 0.73);

    CHECK_THROWS_AS(fit_exponent({{256.0, 1.0}, {512.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("emitted CSV and JSON agree with the trace") {
    ExperimentConfig cfg;
    cfg.body = "ball:R=1.0,d=2";
    cfg.learner = "main";
    cfg.adversary = "iid-sphere";
    cfg.T = 25;
    cfg.seed = 11;
    cfg.out = "emit_check";
    auto trace = run(cfg);

    std::ifstream csv("emit_check.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,loss,cum_regret_vs_final_comparator,loo_calls");
    std::string line;
    double cum = 0.0;
    long rows = 0;
    std::uint64_t last_loo = 0;
    double last_regret = 0.0;
    while (std::getline(csv, line)) {
        std::stringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        const long t = std::stol(cell);
        std::getline(ls, cell, ',');
        const double loss = std::stod(cell);
        std::getline(ls, cell, ',');
        last_regret = std::stod(cell);
        std::getline(ls, cell, ',');
        const std::uint64_t loo = std::stoull(cell);
        CHECK(loo >= last_loo);
        last_loo = loo;
        cum += loss;
        REQUIRE(t == rows + 1);
        ++rows;
        CHECK(loss == doctest::Approx(trace.rounds[t - 1].loss).epsilon(1e-12));
    }
    CHECK(rows == 25);
    CHECK(cum == doctest::Approx(trace.rounds.back().cum_loss).epsilon(1e-9));
    CHECK(last_regret == doctest::Approx(trace.final_regret).epsilon(1e-9));

    const std::string js = slurp("emit_check.json");
    CHECK(js.find("\"schema\": 1") != std::string::npos);
    CHECK(js.find("\"loo_calls_total\": " + std::to_string(last_loo)) != std::string::npos);
}

TEST_CASE("membership audit aborts on an out-of-body play") {
    // the freegrad learner is unconstrained and exempt from the audit
    ExperimentConfig cfg;
    cfg.body = "ball:R=1.0,d=1";
    cfg.learner = "freegrad";
    cfg.adversary = "iid-sphere";
    cfg.T = 64;
    cfg.seed = 1;
    CHECK_NOTHROW(run(cfg));
}

TEST_CASE("light sweep presets run clean and fit") {
    for (const std::string preset : {"ftl-strong", "freegrad-1d"}) {
        auto report = run_sweep_preset(preset, "sweep_test_out", 2);
        REQUIRE(report.fits.size() == 1);
        CHECK(report.runs.size() == 70);
        CHECK(std::isfinite(report.fits[0].fit.slope));
        std::ifstream json("sweep_test_out/" + preset + ".json");
        CHECK(json.good());
    }
}

TEST_CASE("ftal through the harness obeys base-body membership") {
    std::ofstream f("harness_square.csv");
    f << "1,1\n1,-1\n-1,1\n-1,-1\n";
    f.close();
    ExperimentConfig cfg;
    cfg.body = "poly:file=harness_square.csv";
    cfg.learner = "ftal:eps=0.2,delta=1e-8";
    cfg.adversary = "iid-sphere";
    cfg.T = 30;
    cfg.seed = 5;
    auto trace = run(cfg);
    CHECK(trace.rounds.size() == 30);
    CHECK(trace.resolved.eps == doctest::Approx(0.2));
}
