#include "playlab/experiment.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "playlab/error.hpp"
#include "playlab/gemm.hpp"

namespace playlab {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_list_int(const std::vector<int>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

std::string fmt_list_u64(const std::vector<uint64_t>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

} // namespace

void ExperimentConfig::validate() const {
    if (seeds.empty()) throw ConfigError("experiment: seeds list must not be empty");
    if (latent_dims.empty()) throw ConfigError("experiment: latent_dims must not be empty");
    for (const int d : latent_dims)
        if (d <= 0) throw ConfigError("experiment: latent_dims entries must be positive");
    if (total_steps <= 0) throw ConfigError("experiment: total_steps must be positive");
    if (eval_period <= 0 || total_steps % eval_period != 0)
        throw ConfigError("experiment: eval_period must divide total_steps");
    if (final_window <= 0) throw ConfigError("experiment: final_window must be positive");
    if (warmup_episodes < 1) throw ConfigError("experiment: warmup_episodes must be >= 1");
    if (catalog_size < 2) throw ConfigError("experiment: catalog_size must be >= 2");
    if (probe_size < 10) throw ConfigError("experiment: probe_size must be >= 10");
    if (static_cast<int>(slots_per_location.size()) != n_locations)
        throw ConfigError("experiment: slots list length must equal locations");
    if (buffer_capacity < 2 * static_cast<size_t>(learn.batch_pairs))
        throw ConfigError("experiment: buffer capacity below one batch");
    session.validate();
}

ConfigMap ExperimentConfig::to_config() const {
    ConfigMap map;
    map.set("experiment", "preset", preset_name);
    map.set("experiment", "total_steps", std::to_string(total_steps));
    map.set("experiment", "eval_period", std::to_string(eval_period));
    map.set("experiment", "final_window", std::to_string(final_window));
    map.set("experiment", "seeds", fmt_list_u64(seeds));
    map.set("experiment", "latent_dims", fmt_list_int(latent_dims));
    map.set("experiment", "warmup_episodes", std::to_string(warmup_episodes));
    map.set("experiment", "threads", std::to_string(threads));

    map.set("worldgen", "locations", std::to_string(n_locations));
    map.set("worldgen", "slots", fmt_list_int(slots_per_location));
    map.set("worldgen", "tier", tier_name(tier));
    map.set("worldgen", "catalog_size", std::to_string(catalog_size));
    map.set("worldgen", "textured_fraction", fmt_double(textured_fraction));
    map.set("worldgen", "world_seed", std::to_string(world_seed));
    map.set("worldgen", "test_world_seed", std::to_string(test_world_seed));

    map.set("renderer", "image_size", std::to_string(session.render.width));
    map.set("renderer", "vertical_fov", fmt_double(session.render.vertical_fov_deg));
    map.set("renderer", "near_plane", fmt_double(session.render.near_plane));
    map.set("renderer", "far_plane", fmt_double(session.render.far_plane));

    map.set("session", "episode_length", std::to_string(session.episode_length));
    map.set("session", "switch_period", std::to_string(session.switch_period));
    map.set("session", "azimuth_min", fmt_double(session.azimuth_min_deg));
    map.set("session", "azimuth_max", fmt_double(session.azimuth_max_deg));
    map.set("session", "body_rotation", session.body_rotation ? "true" : "false");
    map.set("session", "distance_factor", fmt_double(session.distance.factor));

    map.set("retina", "saccade_amplitude", fmt_double(session.saccade.amplitude_deg));
    map.set("retina", "aperture", fmt_double(session.aperture.aperture_number));
    map.set("retina", "aperture_enabled", session.aperture.enabled ? "true" : "false");
    map.set("retina", "foveation_enabled", session.foveation.enabled ? "true" : "false");
    map.set("retina", "foveation_levels", std::to_string(session.foveation.levels));
    map.set("retina", "half_res_eccentricity",
            fmt_double(session.foveation.half_res_eccentricity_deg));

    map.set("learner", "temperature", fmt_double(learn.temperature));
    map.set("learner", "learning_rate", fmt_double(learn.learning_rate));
    map.set("learner", "weight_decay", fmt_double(learn.weight_decay));
    map.set("learner", "batch_pairs", std::to_string(learn.batch_pairs));
    map.set("learner", "buffer_capacity", std::to_string(buffer_capacity));

    map.set("evaluation", "probe_size", std::to_string(probe_size));
    return map;
}

std::string ExperimentConfig::resolved_dump() const { return to_config().dump(); }

uint64_t ExperimentConfig::config_hash() const { return Rng::hash_str(resolved_dump()); }

void ExperimentConfig::apply(const ConfigMap& map) {
    preset_name = map.get_string("experiment", "preset", preset_name);
    total_steps = map.get_int("experiment", "total_steps", total_steps);
    eval_period = map.get_int("experiment", "eval_period", eval_period);
    final_window = static_cast<int>(map.get_int("experiment", "final_window", final_window));
    seeds = map.get_u64_list("experiment", "seeds", seeds);
    latent_dims = map.get_int_list("experiment", "latent_dims", latent_dims);
    warmup_episodes = static_cast<int>(map.get_int("experiment", "warmup_episodes", warmup_episodes));
    threads = static_cast<int>(map.get_int("experiment", "threads", threads));

    n_locations = static_cast<int>(map.get_int("worldgen", "locations", n_locations));
    slots_per_location = map.get_int_list("worldgen", "slots", slots_per_location);
    tier = tier_from_name(map.get_string("worldgen", "tier", tier_name(tier)));
    catalog_size = static_cast<int>(map.get_int("worldgen", "catalog_size", catalog_size));
    textured_fraction = map.get_double("worldgen", "textured_fraction", textured_fraction);
    world_seed = map.get_u64("worldgen", "world_seed", world_seed);
    test_world_seed = map.get_u64("worldgen", "test_world_seed", test_world_seed);

    const int image_size =
        static_cast<int>(map.get_int("renderer", "image_size", session.render.width));
    session.render.width = image_size;
    session.render.height = image_size;
    session.render.vertical_fov_deg = static_cast<float>(
        map.get_double("renderer", "vertical_fov", session.render.vertical_fov_deg));
    session.render.near_plane =
        static_cast<float>(map.get_double("renderer", "near_plane", session.render.near_plane));
    session.render.far_plane =
        static_cast<float>(map.get_double("renderer", "far_plane", session.render.far_plane));

    session.episode_length =
        static_cast<int>(map.get_int("session", "episode_length", session.episode_length));
    session.switch_period =
        static_cast<int>(map.get_int("session", "switch_period", session.switch_period));
    session.azimuth_min_deg =
        static_cast<float>(map.get_double("session", "azimuth_min", session.azimuth_min_deg));
    session.azimuth_max_deg =
        static_cast<float>(map.get_double("session", "azimuth_max", session.azimuth_max_deg));
    session.body_rotation = map.get_bool("session", "body_rotation", session.body_rotation);
    session.distance.factor =
        static_cast<float>(map.get_double("session", "distance_factor", session.distance.factor));

    session.saccade.amplitude_deg = static_cast<float>(
        map.get_double("retina", "saccade_amplitude", session.saccade.amplitude_deg));
    session.aperture.aperture_number = static_cast<float>(
        map.get_double("retina", "aperture", session.aperture.aperture_number));
    session.aperture.enabled =
        map.get_bool("retina", "aperture_enabled", session.aperture.enabled);
    session.foveation.enabled =
        map.get_bool("retina", "foveation_enabled", session.foveation.enabled);
    session.foveation.levels =
        static_cast<int>(map.get_int("retina", "foveation_levels", session.foveation.levels));
    session.foveation.half_res_eccentricity_deg = static_cast<float>(map.get_double(
        "retina", "half_res_eccentricity", session.foveation.half_res_eccentricity_deg));

    learn.temperature = map.get_double("learner", "temperature", learn.temperature);
    learn.learning_rate = map.get_double("learner", "learning_rate", learn.learning_rate);
    learn.weight_decay = map.get_double("learner", "weight_decay", learn.weight_decay);
    learn.batch_pairs = static_cast<int>(map.get_int("learner", "batch_pairs", learn.batch_pairs));
    buffer_capacity = map.get_u64("learner", "buffer_capacity", buffer_capacity);

    probe_size = static_cast<int>(map.get_int("evaluation", "probe_size", probe_size));

    const auto unknown = map.unconsumed();
    if (!unknown.empty()) throw ConfigError(unknown.front());
    validate();
}

std::vector<ReportRow> read_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("read_report_csv: cannot open " + path);
    std::vector<ReportRow> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::istringstream ss(line);
        ReportRow row;
        std::string field;
        std::getline(ss, row.preset, ',');
        std::getline(ss, field, ',');
        row.seed = std::stoull(field);
        std::getline(ss, field, ',');
        row.step = std::stoll(field);
        std::getline(ss, field, ',');
        row.latent_dim = std::stoi(field);
        std::getline(ss, row.metric, ',');
        std::getline(ss, field, ',');
        row.value = std::stod(field);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<MetricSummary> summarize_rows(const std::vector<ReportRow>& rows, int final_window) {
    // metric -> latent -> seed -> (step, value), kept in CSV order.
    std::map<std::string, std::map<int, std::map<uint64_t, std::vector<double>>>> grouped;
    for (const auto& row : rows)
        grouped[row.metric][row.latent_dim][row.seed].push_back(row.value);

    std::vector<MetricSummary> out;
    for (const auto& [metric, by_latent] : grouped)
        for (const auto& [latent, by_seed] : by_latent) {
            std::vector<double> per_seed_means;
            for (const auto& [seed, values] : by_seed) {
                const size_t window =
                    std::min(values.size(), static_cast<size_t>(final_window));
                double mean = 0.0;
                for (size_t i = values.size() - window; i < values.size(); ++i) mean += values[i];
                per_seed_means.push_back(mean / static_cast<double>(window));
            }
            MetricSummary s;
            s.metric = metric;
            s.latent_dim = latent;
            s.n_seeds = static_cast<int>(per_seed_means.size());
            for (const double m : per_seed_means) s.mean += m;
            s.mean /= static_cast<double>(per_seed_means.size());
            double var = 0.0;
            for (const double m : per_seed_means) var += (m - s.mean) * (m - s.mean);
            s.stddev = std::sqrt(var / static_cast<double>(per_seed_means.size()));
            out.push_back(std::move(s));
        }
    return out;
}

namespace {

void append_row(std::ofstream& csv, const ReportRow& row) {
    csv << row.preset << "," << row.seed << "," << row.step << "," << row.latent_dim << ","
        << row.metric << "," << fmt_double(row.value) << "\n";
}

struct SingleRunContext {
    const ExperimentConfig* cfg;
    const SceneGraph* scene;
    const SceneGraph* test_scene;
    const std::vector<ToyObject>* catalog;
};

void run_single(const SingleRunContext& ctx, int latent_dim, uint64_t seed, std::ofstream& csv,
                const std::string& out_dir) {
    const ExperimentConfig& cfg = *ctx.cfg;
    Rng master(seed);
    Rng session_rng = master.child("sessions");
    Rng train_rng = master.child("train");
    const uint64_t split_seed = master.child("probe_split").next_u64();

    LearnConfig learn = cfg.learn;
    learn.latent_dim = latent_dim;
    EncoderParams<float> params =
        EncoderParams<float>::initialize(latent_dim, master.child("init").next_u64());
    OptimizerState<float> opt = OptimizerState<float>::like(params);

    ProbeDatasetConfig probe_cfg;
    probe_cfg.size = cfg.probe_size;
    probe_cfg.saccade = cfg.session.saccade;
    probe_cfg.aperture = cfg.session.aperture;
    probe_cfg.foveation = cfg.session.foveation;
    probe_cfg.distance = cfg.session.distance;
    probe_cfg.render = cfg.session.render;
    probe_cfg.quiet = true;
    const uint64_t probe_seed = master.child("probe_data").next_u64();
    const ProbeDataset validation =
        build_probe_dataset(ProbeSplit::Validation, *ctx.scene, *ctx.catalog, probe_cfg, probe_seed);
    const ProbeDataset test =
        build_probe_dataset(ProbeSplit::Test, *ctx.test_scene, *ctx.catalog, probe_cfg, probe_seed);

    auto frame_ptrs = [](const ProbeDataset& ds) {
        std::vector<const RetinalFrame*> ptrs;
        ptrs.reserve(ds.frames.size());
        for (const auto& f : ds.frames) ptrs.push_back(&f);
        return ptrs;
    };
    const auto val_ptrs = frame_ptrs(validation);
    const auto test_ptrs = frame_ptrs(test);

    ReplayBuffer buffer(cfg.buffer_capacity);
    int64_t episode_id = 0;
    for (int e = 0; e < cfg.warmup_episodes; ++e)
        buffer.push_stream(
            run_play_session(*ctx.scene, *ctx.catalog, cfg.session, session_rng, episode_id++));

    auto evaluate = [&](int64_t step, double mean_loss) {
        const Tensor<float> val_latents = encode_frames(params, val_ptrs);
        const Tensor<float> test_latents = encode_frames(params, test_ptrs);
        const double voa = fit_and_eval_probe(val_latents, validation.object_labels,
                                              validation.n_classes, ProbeTarget::Object, split_seed)
                               .accuracy;
        const double vba =
            fit_and_eval_probe(val_latents, validation.background_labels, validation.n_backgrounds,
                               ProbeTarget::Background, split_seed)
                .accuracy;
        const double toa = fit_and_eval_probe(test_latents, test.object_labels, test.n_classes,
                                              ProbeTarget::Object, split_seed)
                               .accuracy;
        const double tba = fit_and_eval_probe(test_latents, test.background_labels,
                                              test.n_backgrounds, ProbeTarget::Background, split_seed)
                               .accuracy;
        append_row(csv, {cfg.preset_name, seed, step, latent_dim, "VOA", voa});
        append_row(csv, {cfg.preset_name, seed, step, latent_dim, "VBA", vba});
        append_row(csv, {cfg.preset_name, seed, step, latent_dim, "TOA", toa});
        append_row(csv, {cfg.preset_name, seed, step, latent_dim, "TBA", tba});
        append_row(csv, {cfg.preset_name, seed, step, latent_dim, "train_loss", mean_loss});
        csv.flush();
        if (!csv) throw StateError("run_experiment: failed writing the report CSV");
    };

    int64_t step = 0;
    double loss_accum = 0.0;
    int64_t loss_count = 0;
    while (step < cfg.total_steps) {
        const EpisodeStream stream =
            run_play_session(*ctx.scene, *ctx.catalog, cfg.session, session_rng, episode_id++);
        buffer.push_stream(stream);
        for (int i = 0; i < cfg.session.episode_length && step < cfg.total_steps; ++i) {
            loss_accum += train_step(buffer, params, opt, learn, train_rng);
            ++loss_count;
            ++step;
            if (step % cfg.eval_period == 0) {
                evaluate(step, loss_accum / static_cast<double>(loss_count));
                loss_accum = 0.0;
                loss_count = 0;
                std::cerr << "  [" << cfg.preset_name << " seed " << seed << " latent "
                          << latent_dim << "] step " << step << "/" << cfg.total_steps << "\n";
            }
        }
    }

    char name[96];
    std::snprintf(name, sizeof(name), "/checkpoint_latent%d_seed%" PRIu64 ".bin", latent_dim, seed);
    save_checkpoint(out_dir + name, params, opt,
                    cfg.config_hash() ^ (static_cast<uint64_t>(latent_dim) * 0x9e37u) ^ seed);
}

} // namespace

void run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    set_compute_threads(cfg.threads);
    std::filesystem::create_directories(out_dir);

    const SceneGraph scene =
        build_house(cfg.n_locations, cfg.tier, cfg.slots_per_location, cfg.world_seed);
    const SceneGraph test_scene =
        build_house(cfg.n_locations, cfg.tier, cfg.slots_per_location, cfg.test_world_seed);
    const std::vector<ToyObject> catalog =
        generate_object_catalog(cfg.catalog_size, cfg.textured_fraction, cfg.world_seed);

    {
        std::ofstream scene_out(out_dir + "/scene_train.txt");
        serialize_scene(scene, scene_out);
        std::ofstream test_out(out_dir + "/scene_test.txt");
        serialize_scene(test_scene, test_out);
    }
    {
        char hex[32];
        std::ofstream meta(out_dir + "/metadata.txt");
        meta << "[run]\n";
        meta << "code_version = " << kCodeVersion << "\n";
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(scene_checksum(scene)));
        meta << "scene_train_checksum = " << hex << "\n";
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(scene_checksum(test_scene)));
        meta << "scene_test_checksum = " << hex << "\n";
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(cfg.config_hash()));
        meta << "config_hash = " << hex << "\n\n";
        meta << cfg.resolved_dump();
    }

    std::ofstream csv(out_dir + "/report.csv");
    if (!csv) throw StateError("run_experiment: cannot create report.csv in " + out_dir);
    csv << "preset,seed,step,latent_dim,metric,value\n";

    SingleRunContext ctx{&cfg, &scene, &test_scene, &catalog};
    for (const int latent : cfg.latent_dims)
        for (const uint64_t seed : cfg.seeds) run_single(ctx, latent, seed, csv, out_dir);
    csv.close();

    emit_report(out_dir);
}

} // namespace playlab
