#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "playlab/gemm.hpp"
#include "playlab/rng.hpp"
#include "playlab/tensor.hpp"

namespace playlab {

// Convolution stack: [channels, kernel, stride, padding] per layer, each
// followed by ReLU and dropout, then global average pooling and one linear
// layer down to the latent dimension.
struct ConvSpec {
    int out_channels, kernel, stride, padding;
};

inline constexpr std::array<ConvSpec, 4> kEncoderConvSpecs{{
    {64, 8, 4, 2},
    {128, 4, 2, 1},
    {256, 2, 2, 1},
    {256, 2, 2, 1},
}};

inline constexpr float kDropoutP = 0.5f;
inline constexpr int kEncoderInputChannels = 3;

inline int conv_output_size(int input, int kernel, int stride, int padding) {
    return (input + 2 * padding - kernel) / stride + 1;
}

struct ConvShape {
    int in_c, out_c, kernel, stride, pad;
    int in_h, in_w, out_h, out_w;
};

// Per-layer spatial bookkeeping for a given input size; throws InputError if
// any layer would collapse to an empty output.
std::array<ConvShape, 4> encoder_conv_shapes(int in_h, int in_w);

enum class EncoderMode { Train, Eval };

template <typename T>
struct EncoderParams {
    std::vector<Tensor<T>> conv_weights; // [out_c, in_c * k * k]
    std::vector<Tensor<T>> conv_biases;  // [out_c]
    Tensor<T> linear_weight;             // [latent_dim, 256]
    Tensor<T> linear_bias;               // [latent_dim]
    int latent_dim = 20;

    // Registry order is the contract for the optimizer, checkpoints and the
    // gradient checks: conv1..4 (weight, bias), then linear weight, bias.
    std::vector<Tensor<T>*> tensors();
    std::vector<const Tensor<T>*> tensors() const;
    std::vector<std::string> tensor_names() const;

    // Fan-in scaled uniform weights, zero biases, deterministic per seed.
    static EncoderParams initialize(int latent_dim, uint64_t seed);
};

// Gradients in the same registry order as EncoderParams::tensors().
template <typename T>
struct EncoderGrads {
    std::vector<Tensor<T>> tensors;
};

// Forward records; consumed exactly once by encoder_backward.
template <typename T>
struct GradientTape {
    bool consumed = false;
    EncoderMode mode = EncoderMode::Eval;
    int batch = 0, in_h = 0, in_w = 0;
    std::array<ConvShape, 4> shapes{};

    struct LayerRecord {
        Tensor<T> cols;                    // im2col patches [K, B*OH*OW]
        Tensor<T> pre_act;                 // [out_c, B*OH*OW], before ReLU
        std::vector<uint8_t> dropout_mask; // kept-unit flags, train mode only
    };
    std::array<LayerRecord, 4> layers;
    Tensor<T> pooled; // [B, 256]
};

// images: [B, 3, H, W] in [0, 1]. Train mode draws dropout masks from `rng`
// (inverted scaling, so eval applies no rescale). Pass a tape to enable
// backward; eval-only callers may pass nullptr.
template <typename T>
Tensor<T> encoder_forward(const EncoderParams<T>& params, const Tensor<T>& images,
                          EncoderMode mode, Rng* rng, GradientTape<T>* tape);

// Exact reverse-mode gradients; consumes the tape. Optionally also returns
// the gradient w.r.t. the input pixels (used by saliency maps).
template <typename T>
EncoderGrads<T> encoder_backward(const EncoderParams<T>& params, GradientTape<T>& tape,
                                 const Tensor<T>& d_latents, Tensor<T>* d_input = nullptr);

// Low-level kernels shared by the encoder and the gradient checks.
namespace layers {

template <typename T>
void im2col(const T* act, int channels, int batch, int height, int width, const ConvShape& shape,
            T* cols);

template <typename T>
void col2im(const T* cols, int channels, int batch, int height, int width, const ConvShape& shape,
            T* act_accum);

} // namespace layers

extern template Tensor<float> encoder_forward(const EncoderParams<float>&, const Tensor<float>&,
                                              EncoderMode, Rng*, GradientTape<float>*);
extern template Tensor<double> encoder_forward(const EncoderParams<double>&, const Tensor<double>&,
                                               EncoderMode, Rng*, GradientTape<double>*);
extern template EncoderGrads<float> encoder_backward(const EncoderParams<float>&,
                                                     GradientTape<float>&, const Tensor<float>&,
                                                     Tensor<float>*);
extern template EncoderGrads<double> encoder_backward(const EncoderParams<double>&,
                                                      GradientTape<double>&, const Tensor<double>&,
                                                      Tensor<double>*);

} // namespace playlab
