#pragma once

#include <string>

#include "playlab/encoder.hpp"
#include "playlab/loss.hpp"
#include "playlab/optimizer.hpp"
#include "playlab/session.hpp"

namespace playlab {

struct LearnConfig {
    double temperature = 0.5; // tau
    double learning_rate = 5e-4;
    double weight_decay = 1e-6;
    int batch_pairs = 32; // N anchors per batch
    int latent_dim = 20;
};

// Builds the [2N, 3, H, W] image tensor for a sampled batch: anchors in rows
// 0..N-1, positives in N..2N-1 (the pairing layout the loss expects).
Tensor<float> batch_to_tensor(const ReplayBuffer& buffer, const ContrastiveBatch& batch);

// One training update: sample a batch, forward in train mode, loss, backward,
// AdamW. Returns the scalar loss. `rng` drives batch sampling and dropout.
double train_step(const ReplayBuffer& buffer, EncoderParams<float>& params,
                  OptimizerState<float>& state, const LearnConfig& cfg, Rng& rng);

// Eval-mode latents for a stack of frames, encoded in fixed-size chunks.
Tensor<float> encode_frames(const EncoderParams<float>& params,
                            const std::vector<const RetinalFrame*>& frames);
Tensor<float> frames_to_tensor(const std::vector<const RetinalFrame*>& frames);

// Versioned binary checkpoint: magic, config hash, named little-endian f32
// tensors, then optimizer state. Loading validates magic, version and hash.
void save_checkpoint(const std::string& path, const EncoderParams<float>& params,
                     const OptimizerState<float>& state, uint64_t config_hash);

struct Checkpoint {
    EncoderParams<float> params;
    OptimizerState<float> state;
};
Checkpoint load_checkpoint(const std::string& path, uint64_t expected_config_hash);

} // namespace playlab
