#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "playlab/config.hpp"
#include "playlab/evaluation.hpp"
#include "playlab/session.hpp"
#include "playlab/trainer.hpp"

namespace playlab {

inline constexpr const char* kCodeVersion = "playlab 0.1.0";

// Fully resolved experiment description. Defaults are the paper-scale
// baseline; presets and config files override from there.
struct ExperimentConfig {
    std::string preset_name = "baseline";

    // worldgen
    int n_locations = 4;
    std::vector<int> slots_per_location = {2, 4, 4, 6};
    BackgroundTier tier = BackgroundTier::FullRoom;
    int catalog_size = 20;
    double textured_fraction = 0.5;
    uint64_t world_seed = 101;
    uint64_t test_world_seed = 202; // novel house for the test split

    // session + retina + renderer
    SessionConfig session;

    // learner
    LearnConfig learn;
    size_t buffer_capacity = 80000;

    // evaluation
    int probe_size = 1200;

    // experiment loop
    int64_t total_steps = 400000;
    int64_t eval_period = 4000;
    int final_window = 10; // evals averaged into the summary
    std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
    std::vector<int> latent_dims = {20};
    int warmup_episodes = 10;
    int threads = 1;

    void validate() const;
    ConfigMap to_config() const;   // every effective value, explicit
    std::string resolved_dump() const;
    uint64_t config_hash() const;

    // Applies `map` on top of this config; rejects unknown keys.
    void apply(const ConfigMap& map);
};

// Preset registry covering the experiment grid: the clear-image baseline,
// closeness, saccade amplitudes, aperture sweep, foveation x saccade,
// background tiers and counts, the combined setting, plus desk/trend-scale
// variants sized for a single workstation.
struct PresetInfo {
    std::string name;
    std::string description;
    std::string base; // empty = built-in defaults
    std::vector<std::array<std::string, 3>> overrides; // {section, key, value}
};

std::vector<std::string> preset_names();
const PresetInfo& preset_info(const std::string& name); // throws ConfigError, message lists names
ExperimentConfig preset_ablation(const std::string& name);

// One CSV record: preset,seed,step,latent_dim,metric,value.
struct ReportRow {
    std::string preset;
    uint64_t seed = 0;
    int64_t step = 0;
    int latent_dim = 0;
    std::string metric;
    double value = 0.0;
};

std::vector<ReportRow> read_report_csv(const std::string& path);

struct MetricSummary {
    std::string metric;
    int latent_dim = 0;
    double mean = 0.0;   // mean over seeds of per-seed final-window means
    double stddev = 0.0; // population std over seeds
    int n_seeds = 0;
};

std::vector<MetricSummary> summarize_rows(const std::vector<ReportRow>& rows, int final_window);

// Runs every (latent_dim x seed) combination of the config, streaming rows
// into <out_dir>/report.csv, then writes summary + plots. Deterministic:
// identical (config, seed) produce byte-identical outputs.
void run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Summary table + SVG line plots from an existing run directory. Returns
// false (with a warning on stderr) when the CSV is missing or empty.
bool emit_report(const std::string& run_dir);

} // namespace playlab
