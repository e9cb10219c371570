#include "looplab/biot_savart.hpp"
#include "looplab/config.hpp"
#include "looplab/experiments.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <iostream>

#ifndef LOOPLAB_VERSION
#define LOOPLAB_VERSION "dev"
#endif

using namespace looplab;

int main(int argc, char** argv) {
    CLI::App app{"looplab: discretized loop-equation experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", LOOPLAB_VERSION);

    auto* run = app.add_subcommand("run", "Run the experiments listed in a YAML config");
    std::string config;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out;
    run->add_option("config", config, "config file")->required();
    auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
    auto* threads_opt = run->add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    auto* out_opt = run->add_option("--out", out, "output directory (default: $LOOPLAB_OUT, then the config)");

    app.add_subcommand("list-experiments", "List experiment ids and what each verifies");

    auto* describe = app.add_subcommand("describe", "Describe one experiment");
    std::string id;
    describe->add_option("id", id, "experiment id")->required();

    auto* dump = app.add_subcommand("dump-r-table", "Print the Biot-Savart remainder R(kappa) as CSV");
    double kmax = 64.0, step = 0.25;
    std::string form = "derived";
    dump->add_option("--kmax", kmax, "largest kappa")->check(CLI::PositiveNumber);
    dump->add_option("--step", step, "kappa spacing")->check(CLI::PositiveNumber);
    dump->add_option("--form", form, "derived | single-term")->check(CLI::IsMember({"derived", "single-term"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (app.got_subcommand("list-experiments")) {
        for (const auto& e : experiment_registry()) fmt::print("{:<22} {}\n", e.id, e.verifies);
        return 0;
    }
    if (app.got_subcommand("describe")) {
        const ExperimentInfo* e = find_experiment(id);
        if (!e) {
            fmt::print(stderr, "unknown experiment '{}' (see list-experiments)\n", id);
            return 1;
        }
        fmt::print("{}\n  {}\n  verifies: {}\n  keys: {}\n", e->id, e->title, e->verifies, e->keys);
        return 0;
    }
    if (app.got_subcommand("dump-r-table")) {
        const RemainderForm f = form == "single-term" ? RemainderForm::SingleTerm : RemainderForm::Derived;
        fmt::print("kappa,R\n");
        const long long n = static_cast<long long>(kmax / step + 1e-9);
        for (long long i = 0; i <= n; ++i) fmt::print("{},{}\n", num(i * step), num(remainder_R(i * step, f)));
        return 0;
    }

    try {
        const RunConfig cfg = load_config(config);
        RunOverrides ov;
        if (*seed_opt) ov.seed = seed;
        if (*threads_opt) ov.threads = threads;
        if (*out_opt) ov.out = out;
        else if (const char* env = std::getenv("LOOPLAB_OUT"); env && *env) ov.out = std::string(env);
        const RunSummary s = run_config(cfg, ov, LOOPLAB_VERSION);
        for (const auto& o : s.outputs) {
            fmt::print("[{}] {}{}\n", o.pass ? "pass" : "FAIL", o.id, o.gating ? "" : " (exploratory)");
            for (const auto& n : o.notes) fmt::print("    {}\n", n);
        }
        fmt::print("outputs in {}\n", s.out_dir);
        return s.exit_code;
    } catch (const ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
