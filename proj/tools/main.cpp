#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "playlab/error.hpp"
#include "playlab/experiment.hpp"
#include "playlab/fd_check.hpp"
#include "playlab/gemm.hpp"

namespace {

int resolve_threads(int cli_threads, bool deterministic) {
    if (deterministic) return 1;
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("PLAYLAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"playlab: embodied-vision playroom simulator and contrastive-learning lab"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir = "runs/out";
    int64_t seed_override = -1;
    bool deterministic = false;
    int threads = 0;

    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "config file (sectioned key = value)")->required();
    run->add_option("--preset", preset, "start from a named preset, then apply the config");
    run->add_option("--seed", seed_override, "override the seeds list with a single seed");
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--deterministic", deterministic, "strict single-thread deterministic mode");
    run->add_option("--threads", threads, "compute threads (default: PLAYLAB_THREADS or 1)");

    std::string report_dir;
    auto* report = app.add_subcommand("report", "regenerate summary and plots for a run");
    report->add_option("dir", report_dir, "run directory")->required();

    auto* presets = app.add_subcommand("presets", "list available presets");

    auto* check = app.add_subcommand("check-gradients", "finite-difference gradient checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            playlab::ExperimentConfig cfg;
            if (!preset.empty()) cfg = playlab::preset_ablation(preset);
            cfg.apply(playlab::ConfigMap::parse_file(config_path));
            if (seed_override >= 0) cfg.seeds = {static_cast<uint64_t>(seed_override)};
            cfg.threads = resolve_threads(threads, deterministic);
            cfg.validate();
            playlab::run_experiment(cfg, out_dir);
            std::cout << "run complete: " << out_dir << "\n";
            return 0;
        }
        if (report->parsed()) {
            return playlab::emit_report(report_dir) ? 0 : 3;
        }
        if (presets->parsed()) {
            for (const auto& name : playlab::preset_names())
                std::cout << name << "\t" << playlab::preset_info(name).description << "\n";
            return 0;
        }
        if (check->parsed()) {
            playlab::set_compute_threads(1);
            bool all_pass = true;
            for (const auto& r : playlab::run_all_fd_checks()) {
                std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.op_name
                          << "  max_rel_error=" << r.max_rel_error << "  tolerance=" << r.tolerance
                          << "\n";
                all_pass = all_pass && r.pass;
            }
            return all_pass ? 0 : 3;
        }
    } catch (const playlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
