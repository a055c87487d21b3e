#include "playlab/trainer.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "playlab/error.hpp"

namespace playlab {

namespace {

void hwc_bytes_to_chw(const StoredFrame& stored, float* dst) {
    const size_t hw = static_cast<size_t>(stored.width) * stored.height;
    for (size_t p = 0; p < hw; ++p)
        for (int c = 0; c < 3; ++c)
            dst[static_cast<size_t>(c) * hw + p] =
                static_cast<float>(stored.rgb[p * 3 + static_cast<size_t>(c)]) / 255.0f;
}

} // namespace

Tensor<float> batch_to_tensor(const ReplayBuffer& buffer, const ContrastiveBatch& batch) {
    const int n = static_cast<int>(batch.pair_count());
    if (n == 0) throw InputError("batch_to_tensor: empty batch");
    const StoredFrame& first = buffer.entry(batch.anchor_idx[0]);
    const int h = first.height, w = first.width;
    Tensor<float> images({2 * n, 3, h, w});
    const size_t frame_elems = static_cast<size_t>(3) * h * w;
    for (int i = 0; i < n; ++i) {
        hwc_bytes_to_chw(buffer.entry(batch.anchor_idx[static_cast<size_t>(i)]),
                         images.ptr() + static_cast<size_t>(i) * frame_elems);
        hwc_bytes_to_chw(buffer.entry(batch.positive_idx[static_cast<size_t>(i)]),
                         images.ptr() + static_cast<size_t>(n + i) * frame_elems);
    }
    return images;
}

double train_step(const ReplayBuffer& buffer, EncoderParams<float>& params,
                  OptimizerState<float>& state, const LearnConfig& cfg, Rng& rng) {
    const ContrastiveBatch batch = buffer.sample_contrastive_batch(cfg.batch_pairs, rng);
    const Tensor<float> images = batch_to_tensor(buffer, batch);

    GradientTape<float> tape;
    const Tensor<float> latents =
        encoder_forward(params, images, EncoderMode::Train, &rng, &tape);
    LossResult<float> loss = simclr_tt_loss(latents, cfg.temperature);
    const EncoderGrads<float> grads = encoder_backward(params, tape, loss.d_latents);

    AdamConfig adam;
    adam.learning_rate = cfg.learning_rate;
    adam.weight_decay = cfg.weight_decay;
    adamw_step(params, grads, state, adam);
    return loss.loss;
}

Tensor<float> frames_to_tensor(const std::vector<const RetinalFrame*>& frames) {
    if (frames.empty()) throw InputError("frames_to_tensor: no frames");
    const int w = frames[0]->width(), h = frames[0]->height();
    Tensor<float> images({static_cast<int>(frames.size()), 3, h, w});
    const size_t hw = static_cast<size_t>(w) * h;
    for (size_t i = 0; i < frames.size(); ++i) {
        if (frames[i]->width() != w || frames[i]->height() != h)
            throw InputError("frames_to_tensor: mixed frame sizes");
        float* dst = images.ptr() + i * 3 * hw;
        const auto& rgb = frames[i]->rgb.data;
        for (size_t p = 0; p < hw; ++p)
            for (int c = 0; c < 3; ++c)
                dst[static_cast<size_t>(c) * hw + p] = rgb[p * 3 + static_cast<size_t>(c)];
    }
    return images;
}

Tensor<float> encode_frames(const EncoderParams<float>& params,
                            const std::vector<const RetinalFrame*>& frames) {
    constexpr size_t kChunk = 64;
    Tensor<float> latents({static_cast<int>(frames.size()), params.latent_dim});
    for (size_t start = 0; start < frames.size(); start += kChunk) {
        const size_t end = std::min(start + kChunk, frames.size());
        std::vector<const RetinalFrame*> chunk(frames.begin() + static_cast<long>(start),
                                               frames.begin() + static_cast<long>(end));
        const Tensor<float> images = frames_to_tensor(chunk);
        const Tensor<float> chunk_latents =
            encoder_forward<float>(params, images, EncoderMode::Eval, nullptr, nullptr);
        std::copy(chunk_latents.data.begin(), chunk_latents.data.end(),
                  latents.data.begin() + static_cast<long>(start * static_cast<size_t>(params.latent_dim)));
    }
    return latents;
}

namespace {

constexpr uint32_t kCheckpointMagic = 0x4b434c50u; // "PLCK" little-endian
constexpr uint32_t kCheckpointVersion = 1;

void write_u32(std::ofstream& out, uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ofstream& out, uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }

uint32_t read_u32(std::ifstream& in) {
    uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
uint64_t read_u64(std::ifstream& in) {
    uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

void write_tensor(std::ofstream& out, const Tensor<float>& t, const std::string& name) {
    write_u32(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, static_cast<uint32_t>(t.shape.size()));
    for (const int d : t.shape) write_u32(out, static_cast<uint32_t>(d));
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(float)));
}

Tensor<float> read_tensor(std::ifstream& in, std::string* name) {
    const uint32_t name_len = read_u32(in);
    if (name_len > 256) throw InputError("checkpoint: corrupt tensor name");
    name->resize(name_len);
    in.read(name->data(), name_len);
    const uint32_t ndims = read_u32(in);
    if (ndims == 0 || ndims > 8) throw InputError("checkpoint: corrupt tensor rank");
    std::vector<int> shape(ndims);
    for (auto& d : shape) d = static_cast<int>(read_u32(in));
    Tensor<float> t(shape);
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    if (!in) throw InputError("checkpoint: truncated tensor data");
    return t;
}

} // namespace

void save_checkpoint(const std::string& path, const EncoderParams<float>& params,
                     const OptimizerState<float>& state, uint64_t config_hash) {
    static_assert(std::endian::native == std::endian::little,
                  "checkpoint writer assumes a little-endian host");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("save_checkpoint: cannot open " + path);
    write_u32(out, kCheckpointMagic);
    write_u32(out, kCheckpointVersion);
    write_u64(out, config_hash);
    write_u32(out, static_cast<uint32_t>(params.latent_dim));

    const auto tensors = params.tensors();
    const auto names = params.tensor_names();
    write_u32(out, static_cast<uint32_t>(tensors.size()));
    for (size_t i = 0; i < tensors.size(); ++i) write_tensor(out, *tensors[i], names[i]);

    write_u64(out, static_cast<uint64_t>(state.step));
    for (size_t i = 0; i < tensors.size(); ++i) write_tensor(out, state.first_moment[i], names[i]);
    for (size_t i = 0; i < tensors.size(); ++i) write_tensor(out, state.second_moment[i], names[i]);
    if (!out) throw InputError("save_checkpoint: short write to " + path);
}

Checkpoint load_checkpoint(const std::string& path, uint64_t expected_config_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("load_checkpoint: cannot open " + path);
    if (read_u32(in) != kCheckpointMagic) throw InputError("load_checkpoint: bad magic");
    if (read_u32(in) != kCheckpointVersion) throw InputError("load_checkpoint: unsupported version");
    const uint64_t hash = read_u64(in);
    if (hash != expected_config_hash)
        throw ConfigError("load_checkpoint: config hash mismatch");
    const int latent_dim = static_cast<int>(read_u32(in));

    Checkpoint ckpt;
    ckpt.params = EncoderParams<float>::initialize(latent_dim, 0);
    auto tensors = ckpt.params.tensors();
    const auto names = ckpt.params.tensor_names();
    const uint32_t count = read_u32(in);
    if (count != tensors.size()) throw InputError("load_checkpoint: tensor count mismatch");
    for (size_t i = 0; i < tensors.size(); ++i) {
        std::string name;
        Tensor<float> t = read_tensor(in, &name);
        if (name != names[i] || t.shape != tensors[i]->shape)
            throw InputError("load_checkpoint: tensor layout mismatch at " + name);
        *tensors[i] = std::move(t);
    }
    ckpt.state = OptimizerState<float>::like(ckpt.params);
    ckpt.state.step = static_cast<int64_t>(read_u64(in));
    for (size_t i = 0; i < tensors.size(); ++i) {
        std::string name;
        ckpt.state.first_moment[i] = read_tensor(in, &name);
    }
    for (size_t i = 0; i < tensors.size(); ++i) {
        std::string name;
        ckpt.state.second_moment[i] = read_tensor(in, &name);
    }
    return ckpt;
}

} // namespace playlab
