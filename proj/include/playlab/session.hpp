#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "playlab/renderer.hpp"
#include "playlab/retina.hpp"
#include "playlab/worldgen.hpp"

namespace playlab {

struct SessionConfig {
    int episode_length = 100; // must be divisible by switch_period
    int switch_period = 10;   // object switch cadence, steps
    float azimuth_min_deg = 0.0f;
    float azimuth_max_deg = 30.0f; // per-step object rotation ~ U[min, max]
    bool body_rotation = true;     // false: single-background control, objects swap in place
    SaccadeConfig saccade;
    ApertureConfig aperture;
    FoveationConfig foveation;
    DistanceFactor distance;
    RenderConfig render;

    void validate() const;
};

struct EpisodeStream {
    int64_t episode_id = 0;
    std::vector<RetinalFrame> frames; // index == step
};

// One 100-step play session: fixate a slot, rotate the toy and saccade every
// step, advance to the next slot (or swap toys in place) every switch_period.
EpisodeStream run_play_session(const SceneGraph& scene, const std::vector<ToyObject>& catalog,
                               const SessionConfig& cfg, Rng& rng, int64_t episode_id);

// Debug/probe export: numbered PPM + depth dumps plus a labels CSV.
void export_stream(const EpisodeStream& stream, const std::string& directory);

// Ring storage entry; RGB is 8-bit quantized to keep 80k frames in memory.
struct StoredFrame {
    int width = 0, height = 0;
    std::vector<uint8_t> rgb;
    int32_t object_label = -1;
    int32_t background_label = -1;
    int32_t location_label = -1;
    int64_t episode_id = 0;
    int32_t step_index = 0;
};

struct ContrastiveBatch {
    // Logical buffer indices (0 = oldest live entry) valid until the next push.
    std::vector<size_t> anchor_idx;
    std::vector<size_t> positive_idx;
    std::vector<int64_t> episode_ids;
    std::vector<int32_t> anchor_steps;
    std::vector<int32_t> positive_steps;

    size_t pair_count() const { return anchor_idx.size(); }
};

// FIFO experience store. Single-writer/multi-reader contract: pushes must be
// serialized externally; sampling never mutates.
class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity = 80000);

    void push_stream(const EpisodeStream& stream);
    void push_frame(const RetinalFrame& frame, int64_t episode_id, int32_t step_index);

    size_t size() const { return size_; }
    size_t capacity() const { return capacity_; }
    int64_t total_pushed() const { return total_pushed_; }
    const StoredFrame& entry(size_t logical_index) const; // 0 = oldest

    // N anchors uniform over entries with an in-episode temporal neighbor;
    // positives are the successor or predecessor with equal probability
    // (forced at episode boundaries). All 2N entries are distinct.
    ContrastiveBatch sample_contrastive_batch(int n_pairs, Rng& rng) const;

    // Dequantized RGB in [0,1], layout matching Image::data.
    std::vector<float> decode_rgb(size_t logical_index) const;

private:
    size_t physical(size_t logical_index) const { return (head_ + logical_index) % capacity_; }

    std::vector<StoredFrame> ring_;
    size_t capacity_;
    size_t head_ = 0;
    size_t size_ = 0;
    int64_t total_pushed_ = 0;
};

} // namespace playlab
