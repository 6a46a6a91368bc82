#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oco/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"projection-free online convex optimization experiments"};
    app.require_subcommand(1);

    oco::ExperimentConfig cfg;
    auto* run_cmd = app.add_subcommand("run", "run one experiment and emit CSV + JSON");
    run_cmd->add_option("--body", cfg.body, "body spec: ball:R=..  lp:p=..,r=..  poly:file=..");
    run_cmd->add_option("--learner", cfg.learner,
                        "ftl | freegrad | ftsl | main[:base=ftl|ftal] | ogd | ftal[:eps=..,delta=..]");
    run_cmd->add_option("--adversary", cfg.adversary,
                        "iid-sphere | sign-flip | smooth-quad | biased-drift");
    run_cmd->add_option("--T", cfg.T, "horizon");
    run_cmd->add_option("--L", cfg.L, "gradient norm bound");
    run_cmd->add_option("--eta", cfg.eta, "learning rate or 'auto'");
    run_cmd->add_option("--mu", cfg.mu, "strong convexity modulus or 'auto'");
    run_cmd->add_option("--eps", cfg.eps, "approximation parameter or 'auto'");
    run_cmd->add_option("--delta", cfg.delta, "solver accuracy or 'auto'");
    run_cmd->add_option("--rho", cfg.rho, "confidence budget used by the auto delta rule");
    run_cmd->add_option("--seed", cfg.seed, "PRNG seed");
    run_cmd->add_option("--out", cfg.out, "output base path (writes .csv and .json)");
    run_cmd->add_flag("--prefix-regret", cfg.prefix_comparators,
                      "also emit regret against the prefix-optimal comparator");

    std::string preset, sweep_out = "sweeps";
    int threads = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a preset horizon sweep");
    sweep_cmd->add_option("--preset", preset,
                          "thm1-ball | thm2-square | ftl-strong | freegrad-1d")
        ->required();
    sweep_cmd->add_option("--out", sweep_out, "output directory");
    sweep_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");

    std::string suite;
    auto* verify_cmd = app.add_subcommand("verify", "run an invariant suite");
    verify_cmd
        ->add_option("--suite", suite,
                     "lemma2 | lemma3 | lemma4 | lemma6 | lemma7 | eq18 | weakloo2d | gradcheck")
        ->required();

    std::vector<std::string> fit_inputs;
    auto* fit_cmd = app.add_subcommand("fit", "fit a scaling exponent from run summaries");
    fit_cmd->add_option("--in", fit_inputs, "JSON summaries with T and final_regret")
        ->required()
        ->expected(-3);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            auto trace = oco::run(cfg);
            std::cout << "T=" << cfg.T << " final_regret=" << oco::format_double(trace.final_regret)
                      << " loo_calls=" << trace.loo_total << "\n";
            return 0;
        }
        if (sweep_cmd->parsed()) {
            auto report = oco::run_sweep_preset(preset, sweep_out, threads);
            for (const auto& f : report.fits)
                std::cout << preset << " adversary=" << f.adversary
                          << " slope=" << oco::format_double(f.fit.slope)
                          << " r2=" << oco::format_double(f.fit.r2) << "\n";
            std::cout << "wrote " << sweep_out << "/" << preset << ".json\n";
            return 0;
        }
        if (verify_cmd->parsed()) {
            const bool ok = oco::verify_suite(suite, std::cout);
            std::cout << suite << ": " << (ok ? "PASS" : "FAIL") << "\n";
            return ok ? 0 : 1;
        }
        if (fit_cmd->parsed()) {
            std::vector<std::pair<double, double>> points;
            for (const auto& path : fit_inputs) {
                std::ifstream in(path);
                if (!in.good()) throw std::runtime_error("cannot read " + path);
                nlohmann::json j;
                in >> j;
                points.emplace_back(j.at("config").at("T").get<double>(),
                                    j.at("final_regret").get<double>());
            }
            auto fit = oco::fit_exponent(points);
            std::cout << "slope=" << oco::format_double(fit.slope)
                      << " r2=" << oco::format_double(fit.r2) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
