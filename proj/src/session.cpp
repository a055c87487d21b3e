#include "playlab/session.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "playlab/error.hpp"

namespace playlab {

void SessionConfig::validate() const {
    if (episode_length <= 0 || switch_period <= 0)
        throw ConfigError("session: episode_length and switch_period must be positive");
    if (episode_length % switch_period != 0)
        throw ConfigError("session: episode_length must be divisible by switch_period");
    if (azimuth_min_deg < 0.0f || azimuth_max_deg >= 360.0f || azimuth_min_deg > azimuth_max_deg)
        throw ConfigError("session: azimuth range must satisfy 0 <= min <= max < 360");
}

EpisodeStream run_play_session(const SceneGraph& scene, const std::vector<ToyObject>& catalog,
                               const SessionConfig& cfg, Rng& rng, int64_t episode_id) {
    cfg.validate();
    EpisodeStream stream;
    stream.episode_id = episode_id;
    stream.frames.reserve(static_cast<size_t>(cfg.episode_length));

    PlaySample sample = sample_play_location(scene, catalog, rng);
    const PlayLocation& location = scene.locations[static_cast<size_t>(sample.location_index)];
    const Vec3 agent_eye = location.center + Vec3{0.0f, kAgentEyeHeight, 0.0f};

    // In rotation mode `current` walks the slots clockwise; in the control
    // mode the body stays put and `current` cycles which toy occupies the
    // initial slot.
    int current = cfg.body_rotation ? sample.initial_slot : 0;
    const int fixated_slot_fixed = sample.initial_slot;

    for (int step = 0; step < cfg.episode_length; ++step) {
        if (step > 0 && step % cfg.switch_period == 0)
            current = (current + 1) % static_cast<int>(sample.placements.size());

        Placement& active = sample.placements[static_cast<size_t>(current)];
        active.azimuth += static_cast<float>(
            rng.uniform(static_cast<double>(cfg.azimuth_min_deg), static_cast<double>(cfg.azimuth_max_deg)));

        const int slot_index = cfg.body_rotation ? active.slot : fixated_slot_fixed;
        const ObjectSlot& slot = location.slots[static_cast<size_t>(slot_index)];

        const auto [saccade_yaw, saccade_pitch] = sample_saccade(cfg.saccade, rng);
        const CameraPose pose =
            pose_camera(agent_eye, slot, saccade_yaw, saccade_pitch, cfg.distance, cfg.render);
        const float focus_depth =
            length(scaled_object_position(agent_eye, slot.position, cfg.distance.factor) - agent_eye);

        std::vector<RenderPlacement> render_placements;
        if (cfg.body_rotation) {
            for (const auto& p : sample.placements) {
                const ObjectSlot& s = location.slots[static_cast<size_t>(p.slot)];
                render_placements.push_back(
                    {&catalog[static_cast<size_t>(p.catalog_index)].mesh,
                     scaled_object_position(agent_eye, s.position, cfg.distance.factor),
                     p.azimuth, catalog[static_cast<size_t>(p.catalog_index)].class_id});
            }
        } else {
            // Only the active toy is out; the rest are put away.
            render_placements.push_back(
                {&catalog[static_cast<size_t>(active.catalog_index)].mesh,
                 scaled_object_position(agent_eye, slot.position, cfg.distance.factor),
                 active.azimuth, catalog[static_cast<size_t>(active.catalog_index)].class_id});
        }

        FrameLabels labels;
        labels.object_label = catalog[static_cast<size_t>(active.catalog_index)].class_id;
        labels.background_label = slot.background_id;
        labels.location_label = location.id;

        RetinalFrame raw = render_view(scene, render_placements, pose, cfg.render, focus_depth, labels);
        stream.frames.push_back(apply_retinal_pipeline(raw, cfg.aperture, cfg.foveation));
    }
    return stream;
}

void export_stream(const EpisodeStream& stream, const std::string& directory) {
    std::filesystem::create_directories(directory);
    std::ofstream csv(directory + "/labels.csv");
    csv << "step,object_label,background_label,location_label,focus_depth\n";
    char name[64];
    for (size_t i = 0; i < stream.frames.size(); ++i) {
        const RetinalFrame& f = stream.frames[i];
        std::snprintf(name, sizeof(name), "frame_%05zu", i);
        dump_frame(f, directory + "/" + name + ".ppm", directory + "/" + name + ".depth");
        csv << i << "," << f.object_label << "," << f.background_label << ","
            << f.location_label << "," << f.focus_depth << "\n";
    }
}

ReplayBuffer::ReplayBuffer(size_t capacity) : ring_(capacity), capacity_(capacity) {
    if (capacity == 0) throw ConfigError("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::push_frame(const RetinalFrame& frame, int64_t episode_id, int32_t step_index) {
    StoredFrame stored;
    stored.width = frame.width();
    stored.height = frame.height();
    stored.rgb.resize(frame.rgb.data.size());
    for (size_t i = 0; i < frame.rgb.data.size(); ++i)
        stored.rgb[i] = static_cast<uint8_t>(
            std::lround(std::clamp(frame.rgb.data[i], 0.0f, 1.0f) * 255.0f));
    stored.object_label = frame.object_label;
    stored.background_label = frame.background_label;
    stored.location_label = frame.location_label;
    stored.episode_id = episode_id;
    stored.step_index = step_index;

    const size_t write_pos = (head_ + size_) % capacity_;
    ring_[write_pos] = std::move(stored);
    if (size_ == capacity_)
        head_ = (head_ + 1) % capacity_; // FIFO eviction of the oldest entry
    else
        ++size_;
    ++total_pushed_;
}

void ReplayBuffer::push_stream(const EpisodeStream& stream) {
    for (size_t i = 0; i < stream.frames.size(); ++i)
        push_frame(stream.frames[i], stream.episode_id, static_cast<int32_t>(i));
}

const StoredFrame& ReplayBuffer::entry(size_t logical_index) const {
    if (logical_index >= size_) throw InputError("ReplayBuffer: index out of range");
    return ring_[physical(logical_index)];
}

std::vector<float> ReplayBuffer::decode_rgb(size_t logical_index) const {
    const StoredFrame& stored = entry(logical_index);
    std::vector<float> out(stored.rgb.size());
    for (size_t i = 0; i < stored.rgb.size(); ++i)
        out[i] = static_cast<float>(stored.rgb[i]) / 255.0f;
    return out;
}

ContrastiveBatch ReplayBuffer::sample_contrastive_batch(int n_pairs, Rng& rng) const {
    if (n_pairs < 1) throw InputError("sample_contrastive_batch: need at least one pair");
    if (size_ < static_cast<size_t>(2 * n_pairs))
        throw NotReadyError("sample_contrastive_batch: buffer holds fewer than 2N frames");

    auto neighbor_ok = [&](size_t logical, size_t other) {
        if (other >= size_) return false;
        const StoredFrame& a = ring_[physical(logical)];
        const StoredFrame& b = ring_[physical(other)];
        return a.episode_id == b.episode_id &&
               std::abs(a.step_index - b.step_index) == 1;
    };

    ContrastiveBatch batch;
    std::unordered_set<size_t> used;
    const int max_attempts = 200 * n_pairs;
    int attempts = 0;
    while (batch.pair_count() < static_cast<size_t>(n_pairs)) {
        if (++attempts > max_attempts)
            throw NotReadyError("sample_contrastive_batch: not enough disjoint adjacent pairs");
        const size_t anchor = rng.uniform_int(size_);
        if (used.count(anchor)) continue;
        const bool has_pred = anchor > 0 && neighbor_ok(anchor, anchor - 1);
        const bool has_succ = neighbor_ok(anchor, anchor + 1);
        if (!has_pred && !has_succ) continue;

        size_t positive;
        if (has_pred && has_succ)
            positive = rng.uniform() < 0.5 ? anchor + 1 : anchor - 1;
        else
            positive = has_succ ? anchor + 1 : anchor - 1;
        if (used.count(positive)) {
            if (!has_pred || !has_succ) continue;
            const size_t other = (positive == anchor + 1) ? anchor - 1 : anchor + 1;
            if (used.count(other)) continue;
            positive = other;
        }

        used.insert(anchor);
        used.insert(positive);
        const StoredFrame& a = ring_[physical(anchor)];
        const StoredFrame& p = ring_[physical(positive)];
        batch.anchor_idx.push_back(anchor);
        batch.positive_idx.push_back(positive);
        batch.episode_ids.push_back(a.episode_id);
        batch.anchor_steps.push_back(a.step_index);
        batch.positive_steps.push_back(p.step_index);
    }
    return batch;
}

} // namespace playlab
