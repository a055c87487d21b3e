#include "playlab/encoder.hpp"

#include <cmath>

namespace playlab {

std::array<ConvShape, 4> encoder_conv_shapes(int in_h, int in_w) {
    std::array<ConvShape, 4> shapes{};
    int c = kEncoderInputChannels, h = in_h, w = in_w;
    for (size_t l = 0; l < kEncoderConvSpecs.size(); ++l) {
        const ConvSpec& spec = kEncoderConvSpecs[l];
        ConvShape& s = shapes[l];
        s.in_c = c;
        s.out_c = spec.out_channels;
        s.kernel = spec.kernel;
        s.stride = spec.stride;
        s.pad = spec.padding;
        s.in_h = h;
        s.in_w = w;
        s.out_h = conv_output_size(h, spec.kernel, spec.stride, spec.padding);
        s.out_w = conv_output_size(w, spec.kernel, spec.stride, spec.padding);
        if (s.out_h <= 0 || s.out_w <= 0)
            throw InputError("encoder: input too small for the conv stack");
        c = s.out_c;
        h = s.out_h;
        w = s.out_w;
    }
    return shapes;
}

template <typename T>
std::vector<Tensor<T>*> EncoderParams<T>::tensors() {
    std::vector<Tensor<T>*> out;
    for (size_t l = 0; l < conv_weights.size(); ++l) {
        out.push_back(&conv_weights[l]);
        out.push_back(&conv_biases[l]);
    }
    out.push_back(&linear_weight);
    out.push_back(&linear_bias);
    return out;
}

template <typename T>
std::vector<const Tensor<T>*> EncoderParams<T>::tensors() const {
    std::vector<const Tensor<T>*> out;
    for (size_t l = 0; l < conv_weights.size(); ++l) {
        out.push_back(&conv_weights[l]);
        out.push_back(&conv_biases[l]);
    }
    out.push_back(&linear_weight);
    out.push_back(&linear_bias);
    return out;
}

template <typename T>
std::vector<std::string> EncoderParams<T>::tensor_names() const {
    std::vector<std::string> names;
    for (size_t l = 0; l < conv_weights.size(); ++l) {
        names.push_back("conv" + std::to_string(l + 1) + ".weight");
        names.push_back("conv" + std::to_string(l + 1) + ".bias");
    }
    names.push_back("linear.weight");
    names.push_back("linear.bias");
    return names;
}

template <typename T>
EncoderParams<T> EncoderParams<T>::initialize(int latent_dim, uint64_t seed) {
    if (latent_dim <= 0) throw ConfigError("encoder: latent_dim must be positive");
    EncoderParams<T> params;
    params.latent_dim = latent_dim;
    Rng rng = Rng(seed).child("encoder_init");

    int in_c = kEncoderInputChannels;
    for (const ConvSpec& spec : kEncoderConvSpecs) {
        const int fan_in = in_c * spec.kernel * spec.kernel;
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Tensor<T> w({spec.out_channels, fan_in});
        for (auto& v : w.data) v = static_cast<T>(rng.uniform(-bound, bound));
        params.conv_weights.push_back(std::move(w));
        params.conv_biases.emplace_back(std::vector<int>{spec.out_channels});
        in_c = spec.out_channels;
    }
    const int feat = kEncoderConvSpecs.back().out_channels;
    const double bound = 1.0 / std::sqrt(static_cast<double>(feat));
    params.linear_weight = Tensor<T>({latent_dim, feat});
    for (auto& v : params.linear_weight.data) v = static_cast<T>(rng.uniform(-bound, bound));
    params.linear_bias = Tensor<T>({latent_dim});
    return params;
}

namespace layers {

template <typename T>
void im2col(const T* act, int channels, int batch, int height, int width, const ConvShape& shape,
            T* cols) {
    const int k = shape.kernel, stride = shape.stride, pad = shape.pad;
    const int oh = shape.out_h, ow = shape.out_w;
    const size_t hw = static_cast<size_t>(height) * width;
    const size_t out_hw = static_cast<size_t>(oh) * ow;
    const size_t n_cols = static_cast<size_t>(batch) * out_hw;
    for (int c = 0; c < channels; ++c) {
        const T* src_c = act + static_cast<size_t>(c) * batch * hw;
        for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
                T* dst = cols + ((static_cast<size_t>(c) * k + ky) * k + kx) * n_cols;
                for (int b = 0; b < batch; ++b) {
                    const T* src_b = src_c + static_cast<size_t>(b) * hw;
                    for (int y = 0; y < oh; ++y) {
                        const int sy = y * stride - pad + ky;
                        T* row = dst + static_cast<size_t>(b) * out_hw + static_cast<size_t>(y) * ow;
                        if (sy < 0 || sy >= height) {
                            for (int x = 0; x < ow; ++x) row[x] = T{0};
                            continue;
                        }
                        const T* src_row = src_b + static_cast<size_t>(sy) * width;
                        for (int x = 0; x < ow; ++x) {
                            const int sx = x * stride - pad + kx;
                            row[x] = (sx >= 0 && sx < width) ? src_row[sx] : T{0};
                        }
                    }
                }
            }
    }
}

template <typename T>
void col2im(const T* cols, int channels, int batch, int height, int width, const ConvShape& shape,
            T* act_accum) {
    const int k = shape.kernel, stride = shape.stride, pad = shape.pad;
    const int oh = shape.out_h, ow = shape.out_w;
    const size_t hw = static_cast<size_t>(height) * width;
    const size_t out_hw = static_cast<size_t>(oh) * ow;
    const size_t n_cols = static_cast<size_t>(batch) * out_hw;
    for (int c = 0; c < channels; ++c) {
        T* dst_c = act_accum + static_cast<size_t>(c) * batch * hw;
        for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
                const T* src = cols + ((static_cast<size_t>(c) * k + ky) * k + kx) * n_cols;
                for (int b = 0; b < batch; ++b) {
                    T* dst_b = dst_c + static_cast<size_t>(b) * hw;
                    for (int y = 0; y < oh; ++y) {
                        const int sy = y * stride - pad + ky;
                        if (sy < 0 || sy >= height) continue;
                        const T* src_row = src + static_cast<size_t>(b) * out_hw + static_cast<size_t>(y) * ow;
                        T* dst_row = dst_b + static_cast<size_t>(sy) * width;
                        for (int x = 0; x < ow; ++x) {
                            const int sx = x * stride - pad + kx;
                            if (sx >= 0 && sx < width) dst_row[sx] += src_row[x];
                        }
                    }
                }
            }
    }
}

template void im2col<float>(const float*, int, int, int, int, const ConvShape&, float*);
template void im2col<double>(const double*, int, int, int, int, const ConvShape&, double*);
template void col2im<float>(const float*, int, int, int, int, const ConvShape&, float*);
template void col2im<double>(const double*, int, int, int, int, const ConvShape&, double*);

} // namespace layers

namespace {

// Bernoulli(1/2) masks come one bit per unit straight from the engine; the
// general-p path draws one uniform per unit.
void fill_dropout_mask(std::vector<uint8_t>& mask, float p, Rng& rng) {
    if (p == 0.5f) {
        uint64_t bits = 0;
        int remaining = 0;
        for (auto& m : mask) {
            if (remaining == 0) {
                bits = rng.next_u64();
                remaining = 64;
            }
            m = static_cast<uint8_t>(bits & 1u);
            bits >>= 1;
            --remaining;
        }
    } else {
        for (auto& m : mask) m = rng.uniform() >= p ? 1 : 0;
    }
}

} // namespace

template <typename T>
Tensor<T> encoder_forward(const EncoderParams<T>& params, const Tensor<T>& images,
                          EncoderMode mode, Rng* rng, GradientTape<T>* tape) {
    if (images.shape.size() != 4 || images.shape[1] != kEncoderInputChannels)
        throw InputError("encoder_forward: expected images of shape [B, 3, H, W]");
    if (mode == EncoderMode::Train && rng == nullptr)
        throw InputError("encoder_forward: train mode needs an rng for dropout");
    const int batch = images.shape[0];
    const int in_h = images.shape[2], in_w = images.shape[3];
    const auto shapes = encoder_conv_shapes(in_h, in_w);

    if (tape != nullptr) {
        tape->consumed = false;
        tape->mode = mode;
        tape->batch = batch;
        tape->in_h = in_h;
        tape->in_w = in_w;
        tape->shapes = shapes;
    }

    // Activations live channel-major: act[c][b * H * W + y * W + x].
    const size_t in_hw = static_cast<size_t>(in_h) * in_w;
    Tensor<T> act({kEncoderInputChannels, batch * static_cast<int>(in_hw)});
    for (int b = 0; b < batch; ++b)
        for (int c = 0; c < kEncoderInputChannels; ++c) {
            const T* src = images.ptr() + (static_cast<size_t>(b) * kEncoderInputChannels + c) * in_hw;
            T* dst = act.ptr() + static_cast<size_t>(c) * batch * in_hw + static_cast<size_t>(b) * in_hw;
            for (size_t i = 0; i < in_hw; ++i) dst[i] = src[i];
        }

    const float keep_scale = 1.0f / (1.0f - kDropoutP);
    for (size_t l = 0; l < shapes.size(); ++l) {
        const ConvShape& s = shapes[l];
        const size_t n_cols = static_cast<size_t>(batch) * s.out_h * s.out_w;
        const int patch = s.in_c * s.kernel * s.kernel;

        Tensor<T> cols({patch, static_cast<int>(n_cols)});
        layers::im2col(act.ptr(), s.in_c, batch, s.in_h, s.in_w, s, cols.ptr());

        Tensor<T> pre({s.out_c, static_cast<int>(n_cols)});
        gemm(false, false, s.out_c, static_cast<int>(n_cols), patch, T{1},
             params.conv_weights[l].ptr(), patch, cols.ptr(), static_cast<int>(n_cols), T{0},
             pre.ptr(), static_cast<int>(n_cols));
        for (int m = 0; m < s.out_c; ++m) {
            const T bias = params.conv_biases[l].data[static_cast<size_t>(m)];
            T* row = pre.ptr() + static_cast<size_t>(m) * n_cols;
            for (size_t j = 0; j < n_cols; ++j) row[j] += bias;
        }

        Tensor<T> post({s.out_c, static_cast<int>(n_cols)});
        for (size_t i = 0; i < pre.numel(); ++i) post.data[i] = pre.data[i] > T{0} ? pre.data[i] : T{0};

        std::vector<uint8_t> mask;
        if (mode == EncoderMode::Train) {
            mask.resize(post.numel());
            fill_dropout_mask(mask, kDropoutP, *rng);
            for (size_t i = 0; i < post.numel(); ++i)
                post.data[i] = mask[i] ? post.data[i] * static_cast<T>(keep_scale) : T{0};
        }

        if (tape != nullptr) {
            tape->layers[l].cols = std::move(cols);
            tape->layers[l].pre_act = std::move(pre);
            tape->layers[l].dropout_mask = std::move(mask);
        }
        act = std::move(post);
    }

    // Global average pool over the spatial dims.
    const ConvShape& last = shapes.back();
    const int feat = last.out_c;
    const size_t spatial = static_cast<size_t>(last.out_h) * last.out_w;
    Tensor<T> pooled({batch, feat});
    const T inv_spatial = T{1} / static_cast<T>(spatial);
    for (int c = 0; c < feat; ++c)
        for (int b = 0; b < batch; ++b) {
            const T* src = act.ptr() + (static_cast<size_t>(c) * batch + b) * spatial;
            T sum{0};
            for (size_t p = 0; p < spatial; ++p) sum += src[p];
            pooled.data[static_cast<size_t>(b) * feat + c] = sum * inv_spatial;
        }
    if (tape != nullptr) tape->pooled = pooled;

    Tensor<T> latents({batch, params.latent_dim});
    gemm(false, true, batch, params.latent_dim, feat, T{1}, pooled.ptr(), feat,
         params.linear_weight.ptr(), feat, T{0}, latents.ptr(), params.latent_dim);
    for (int b = 0; b < batch; ++b)
        for (int d = 0; d < params.latent_dim; ++d)
            latents.data[static_cast<size_t>(b) * params.latent_dim + d] +=
                params.linear_bias.data[static_cast<size_t>(d)];
    return latents;
}

template <typename T>
EncoderGrads<T> encoder_backward(const EncoderParams<T>& params, GradientTape<T>& tape,
                                 const Tensor<T>& d_latents, Tensor<T>* d_input) {
    if (tape.consumed) throw StateError("encoder_backward: tape already consumed");
    tape.consumed = true;
    const int batch = tape.batch;
    if (d_latents.shape.size() != 2 || d_latents.shape[0] != batch ||
        d_latents.shape[1] != params.latent_dim)
        throw InputError("encoder_backward: gradient shape mismatch");

    const auto& shapes = tape.shapes;
    const int feat = shapes.back().out_c;
    const size_t spatial = static_cast<size_t>(shapes.back().out_h) * shapes.back().out_w;

    EncoderGrads<T> grads;
    grads.tensors.resize(10);

    // Linear layer.
    Tensor<T> d_lin_w({params.latent_dim, feat});
    gemm(true, false, params.latent_dim, feat, batch, T{1}, d_latents.ptr(), params.latent_dim,
         tape.pooled.ptr(), feat, T{0}, d_lin_w.ptr(), feat);
    Tensor<T> d_lin_b({params.latent_dim});
    for (int b = 0; b < batch; ++b)
        for (int d = 0; d < params.latent_dim; ++d)
            d_lin_b.data[static_cast<size_t>(d)] +=
                d_latents.data[static_cast<size_t>(b) * params.latent_dim + d];

    Tensor<T> d_pooled({batch, feat});
    gemm(false, false, batch, feat, params.latent_dim, T{1}, d_latents.ptr(), params.latent_dim,
         params.linear_weight.ptr(), feat, T{0}, d_pooled.ptr(), feat);

    // Un-pool into the channel-major activation layout.
    Tensor<T> d_act({feat, batch * static_cast<int>(spatial)});
    const T inv_spatial = T{1} / static_cast<T>(spatial);
    for (int c = 0; c < feat; ++c)
        for (int b = 0; b < batch; ++b) {
            const T g = d_pooled.data[static_cast<size_t>(b) * feat + c] * inv_spatial;
            T* dst = d_act.ptr() + (static_cast<size_t>(c) * batch + b) * spatial;
            for (size_t p = 0; p < spatial; ++p) dst[p] = g;
        }

    const float keep_scale = 1.0f / (1.0f - kDropoutP);
    for (int l = 3; l >= 0; --l) {
        const ConvShape& s = shapes[static_cast<size_t>(l)];
        auto& rec = tape.layers[static_cast<size_t>(l)];
        const size_t n_cols = static_cast<size_t>(batch) * s.out_h * s.out_w;
        const int patch = s.in_c * s.kernel * s.kernel;

        if (tape.mode == EncoderMode::Train) {
            for (size_t i = 0; i < d_act.numel(); ++i)
                d_act.data[i] = rec.dropout_mask[i] ? d_act.data[i] * static_cast<T>(keep_scale) : T{0};
        }
        for (size_t i = 0; i < d_act.numel(); ++i)
            if (rec.pre_act.data[i] <= T{0}) d_act.data[i] = T{0};

        Tensor<T> d_w({s.out_c, patch});
        gemm(false, true, s.out_c, patch, static_cast<int>(n_cols), T{1}, d_act.ptr(),
             static_cast<int>(n_cols), rec.cols.ptr(), static_cast<int>(n_cols), T{0}, d_w.ptr(),
             patch);
        Tensor<T> d_b({s.out_c});
        for (int m = 0; m < s.out_c; ++m) {
            const T* row = d_act.ptr() + static_cast<size_t>(m) * n_cols;
            T sum{0};
            for (size_t j = 0; j < n_cols; ++j) sum += row[j];
            d_b.data[static_cast<size_t>(m)] = sum;
        }
        grads.tensors[static_cast<size_t>(l) * 2] = std::move(d_w);
        grads.tensors[static_cast<size_t>(l) * 2 + 1] = std::move(d_b);

        const bool need_input_grad = l > 0 || d_input != nullptr;
        if (need_input_grad) {
            Tensor<T> d_cols({patch, static_cast<int>(n_cols)});
            gemm(true, false, patch, static_cast<int>(n_cols), s.out_c, T{1},
                 params.conv_weights[static_cast<size_t>(l)].ptr(), patch, d_act.ptr(),
                 static_cast<int>(n_cols), T{0}, d_cols.ptr(), static_cast<int>(n_cols));
            Tensor<T> d_prev({s.in_c, batch * s.in_h * s.in_w});
            layers::col2im(d_cols.ptr(), s.in_c, batch, s.in_h, s.in_w, s, d_prev.ptr());
            d_act = std::move(d_prev);
        }
        rec.cols = Tensor<T>();
        rec.pre_act = Tensor<T>();
    }

    grads.tensors[8] = std::move(d_lin_w);
    grads.tensors[9] = std::move(d_lin_b);

    if (d_input != nullptr) {
        *d_input = Tensor<T>({batch, kEncoderInputChannels, tape.in_h, tape.in_w});
        const size_t in_hw = static_cast<size_t>(tape.in_h) * tape.in_w;
        for (int b = 0; b < batch; ++b)
            for (int c = 0; c < kEncoderInputChannels; ++c) {
                const T* src = d_act.ptr() + static_cast<size_t>(c) * batch * in_hw +
                               static_cast<size_t>(b) * in_hw;
                T* dst = d_input->ptr() + (static_cast<size_t>(b) * kEncoderInputChannels + c) * in_hw;
                for (size_t i = 0; i < in_hw; ++i) dst[i] = src[i];
            }
    }
    return grads;
}

template struct EncoderParams<float>;
template struct EncoderParams<double>;
template Tensor<float> encoder_forward(const EncoderParams<float>&, const Tensor<float>&,
                                       EncoderMode, Rng*, GradientTape<float>*);
template Tensor<double> encoder_forward(const EncoderParams<double>&, const Tensor<double>&,
                                        EncoderMode, Rng*, GradientTape<double>*);
template EncoderGrads<float> encoder_backward(const EncoderParams<float>&, GradientTape<float>&,
                                              const Tensor<float>&, Tensor<float>*);
template EncoderGrads<double> encoder_backward(const EncoderParams<double>&, GradientTape<double>&,
                                               const Tensor<double>&, Tensor<double>*);

} // namespace playlab
