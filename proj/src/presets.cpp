#include "playlab/experiment.hpp"

#include "playlab/error.hpp"

namespace playlab {

namespace {

using Ov = std::array<std::string, 3>;

// Paper-scale presets derive from "baseline" (clear images, distant objects,
// S = 3). Desk/trend presets derive from "trend-baseline", which shrinks the
// image, batch and step budget to workstation scale.
const std::vector<PresetInfo> kPresets = {
    {"baseline", "clear images (no foveation, aperture 20), distance 1.0, S=3", "", {}},

    {"closer", "baseline with objects brought closer by 0.7", "baseline",
     {Ov{"session", "distance_factor", "0.7"}}},

    {"saccade-1", "baseline with saccade amplitude S=1", "baseline",
     {Ov{"retina", "saccade_amplitude", "1"}}},
    {"saccade-2", "baseline with saccade amplitude S=2", "baseline",
     {Ov{"retina", "saccade_amplitude", "2"}}},

    {"aperture-1", "baseline with aperture 1", "baseline", {Ov{"retina", "aperture", "1"}}},
    {"aperture-2", "baseline with aperture 2", "baseline", {Ov{"retina", "aperture", "2"}}},
    {"aperture-3", "baseline with aperture 3", "baseline", {Ov{"retina", "aperture", "3"}}},
    {"aperture-5", "baseline with aperture 5", "baseline", {Ov{"retina", "aperture", "5"}}},

    {"foveation-s1", "foveated input with S=1", "baseline",
     {Ov{"retina", "foveation_enabled", "true"}, Ov{"retina", "saccade_amplitude", "1"}}},
    {"foveation-s2", "foveated input with S=2", "baseline",
     {Ov{"retina", "foveation_enabled", "true"}, Ov{"retina", "saccade_amplitude", "2"}}},
    {"foveation-s3", "foveated input with S=3", "baseline",
     {Ov{"retina", "foveation_enabled", "true"}}},

    {"all", "foveation + aperture 4 + closeness 0.7 + S=1 combined", "baseline",
     {Ov{"retina", "foveation_enabled", "true"}, Ov{"retina", "aperture", "4"},
      Ov{"session", "distance_factor", "0.7"}, Ov{"retina", "saccade_amplitude", "1"}}},

    // Background-complexity ladder: one location, six positions.
    {"tier-white", "single location, white void background", "baseline",
     {Ov{"worldgen", "locations", "1"}, Ov{"worldgen", "slots", "6"},
      Ov{"worldgen", "tier", "white"}, Ov{"experiment", "latent_dims", "20,40,64,128"}}},
    {"tier-emptyroom", "single location, untextured empty room", "baseline",
     {Ov{"worldgen", "locations", "1"}, Ov{"worldgen", "slots", "6"},
      Ov{"worldgen", "tier", "empty_room"}, Ov{"experiment", "latent_dims", "20,40,64,128"}}},
    {"tier-parquet", "single location, empty room with parquet", "baseline",
     {Ov{"worldgen", "locations", "1"}, Ov{"worldgen", "slots", "6"},
      Ov{"worldgen", "tier", "parquet"}, Ov{"experiment", "latent_dims", "20,40,64,128"}}},
    {"tier-fullroom", "single location, textured walls and clutter", "baseline",
     {Ov{"worldgen", "locations", "1"}, Ov{"worldgen", "slots", "6"},
      Ov{"worldgen", "tier", "full_room"}, Ov{"experiment", "latent_dims", "20,40,64,128"}}},

    // Background-count ladder.
    {"bg-6", "one location, 6 backgrounds", "baseline",
     {Ov{"worldgen", "locations", "1"}, Ov{"worldgen", "slots", "6"}}},
    {"bg-10", "two locations, 10 backgrounds", "baseline",
     {Ov{"worldgen", "locations", "2"}, Ov{"worldgen", "slots", "4,6"}}},
    {"bg-16", "four locations, 16 backgrounds (the baseline house)", "baseline", {}},

    {"whiteback", "single white background, body fixed, objects swap in place", "baseline",
     {Ov{"worldgen", "locations", "1"}, Ov{"worldgen", "slots", "6"},
      Ov{"worldgen", "tier", "white"}, Ov{"session", "body_rotation", "false"}}},

    // Desk preset: the determinism/runtime reference workload.
    {"desk", "desk-scale determinism workload: 64x64, 5 objects, 20k steps, N=32", "baseline",
     {Ov{"renderer", "image_size", "64"}, Ov{"worldgen", "locations", "1"},
      Ov{"worldgen", "slots", "5"}, Ov{"worldgen", "catalog_size", "5"},
      Ov{"experiment", "total_steps", "20000"}, Ov{"experiment", "eval_period", "1000"},
      Ov{"experiment", "seeds", "1"}, Ov{"evaluation", "probe_size", "600"},
      Ov{"learner", "batch_pairs", "32"}}},

    // Trend family: directional reproductions at reduced scale, 3 seeds.
    {"trend-baseline", "trend-scale clear-image reference", "baseline",
     {Ov{"renderer", "image_size", "48"}, Ov{"worldgen", "locations", "1"},
      Ov{"worldgen", "slots", "6"}, Ov{"worldgen", "catalog_size", "8"},
      Ov{"experiment", "total_steps", "2000"}, Ov{"experiment", "eval_period", "500"},
      Ov{"experiment", "final_window", "2"}, Ov{"experiment", "seeds", "1,2,3"},
      Ov{"evaluation", "probe_size", "320"}, Ov{"learner", "batch_pairs", "8"},
      Ov{"learner", "buffer_capacity", "20000"}}},
    {"trend-white", "trend scale, white background tier", "trend-baseline",
     {Ov{"worldgen", "tier", "white"}}},
    {"trend-bg16", "trend scale, four locations / 16 backgrounds", "trend-baseline",
     {Ov{"worldgen", "locations", "4"}, Ov{"worldgen", "slots", "2,4,4,6"}}},
    {"trend-closer", "trend scale, objects closer by 0.7", "trend-baseline",
     {Ov{"session", "distance_factor", "0.7"}}},
    {"trend-foveation-s1", "trend scale, foveation with S=1", "trend-baseline",
     {Ov{"retina", "foveation_enabled", "true"}, Ov{"retina", "saccade_amplitude", "1"}}},
    {"trend-foveation-s3", "trend scale, foveation with S=3", "trend-baseline",
     {Ov{"retina", "foveation_enabled", "true"}}},
    {"trend-all", "trend scale, all effects combined", "trend-baseline",
     {Ov{"retina", "foveation_enabled", "true"}, Ov{"retina", "aperture", "4"},
      Ov{"session", "distance_factor", "0.7"}, Ov{"retina", "saccade_amplitude", "1"}}},

    // Smoke run: two toys against a blank background, used by sanity checks.
    {"smoke-white", "tiny white-background smoke training run", "trend-baseline",
     {Ov{"worldgen", "tier", "white"}, Ov{"worldgen", "slots", "2"},
      Ov{"worldgen", "catalog_size", "2"}, Ov{"session", "body_rotation", "false"},
      Ov{"renderer", "image_size", "32"}, Ov{"experiment", "total_steps", "1000"},
      Ov{"experiment", "eval_period", "250"}, Ov{"evaluation", "probe_size", "120"}}},
};

} // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& p : kPresets) names.push_back(p.name);
    return names;
}

const PresetInfo& preset_info(const std::string& name) {
    for (const auto& p : kPresets)
        if (p.name == name) return p;
    std::string msg = "unknown preset '" + name + "'; valid presets:";
    for (const auto& p : kPresets) msg += " " + p.name;
    throw ConfigError(msg);
}

ExperimentConfig preset_ablation(const std::string& name) {
    const PresetInfo& info = preset_info(name);
    ExperimentConfig cfg;
    if (!info.base.empty()) cfg = preset_ablation(info.base);
    ConfigMap overrides;
    for (const auto& ov : info.overrides) overrides.set(ov[0], ov[1], ov[2]);
    overrides.set("experiment", "preset", name);
    cfg.apply(overrides);
    return cfg;
}

} // namespace playlab
