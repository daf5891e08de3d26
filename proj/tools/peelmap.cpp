#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "peelmap/harness.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Peeling simulations of critical Boltzmann maps"};
    double a = 0;
    std::uint64_t seed = 0;
    std::int64_t replicas = 0, steps = 0, r_max = 0, budget = 0, threshold = 0;
    double t_max = 0, t_min = 0;
    std::string mode, out, config_path;
    bool exact = true;
    unsigned threads = 0;

    app.add_option("--config", config_path, "JSON file supplying any of the flags; explicit flags override it");
    auto* o_a = app.add_option("--a", a, "Exponent a in (3/2, 5/2), a != 2");
    auto* o_seed = app.add_option("--seed", seed, "Master seed");
    auto* o_rep = app.add_option("--replicas", replicas, "Number of replicas");
    auto* o_steps = app.add_option("--steps", steps, "Peeling steps (peel), truncation n (dfpp), largest n (oracle)");
    auto* o_rmax = app.add_option("--rmax", r_max, "Largest radius (layers)");
    auto* o_tmax = app.add_option("--tmax", t_max, "Largest FPP time (eden-dilute)");
    auto* o_tmin = app.add_option("--tmin", t_min, "Smallest FPP time on the grid (eden-dilute)");
    auto* o_budget = app.add_option("--budget", budget, "Step budget per replica (layers, eden-dilute)");
    auto* o_mode = app.add_option("--mode", mode, "peel | layers | eden-dilute | dfpp | check | constants | oracle");
    auto* o_out = app.add_option("--out", out, "Output prefix: writes <out>.csv and <out>.json");
    auto* o_exact = app.add_option("--exact-volume", exact, "Exact bubble volumes (true) or the large-bubble shortcut (false)");
    auto* o_thr = app.add_option("--shortcut-threshold", threshold, "Bubble half-perimeter above which the shortcut applies");
    auto* o_threads = app.add_option("--threads", threads, "Worker threads, 0 for all cores");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    peelmap::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw peelmap::ConfigError("cannot open config file " + config_path);
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw peelmap::ConfigError(std::string("config file is not valid JSON: ") + e.what());
            }
            cfg = peelmap::config_from_json(j, cfg);
        }
        if (*o_a) cfg.a = a;
        if (*o_seed) cfg.seed = seed;
        if (*o_rep) cfg.replicas = replicas;
        if (*o_steps) cfg.steps = steps;
        if (*o_rmax) cfg.r_max = r_max;
        if (*o_tmax) cfg.t_max = t_max;
        if (*o_tmin) cfg.t_min = t_min;
        if (*o_budget) cfg.step_budget = budget;
        if (*o_mode) {
            const auto m = peelmap::parse_mode(mode);
            if (!m) throw peelmap::ConfigError("unknown mode '" + mode + "'");
            cfg.mode = *m;
        }
        if (*o_out) cfg.output_path = out;
        if (*o_exact) cfg.exact_volume = exact;
        if (*o_thr) cfg.shortcut_threshold = threshold;
        if (*o_threads) cfg.threads = threads;
    } catch (const peelmap::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    }
    return peelmap::run(cfg);
}
