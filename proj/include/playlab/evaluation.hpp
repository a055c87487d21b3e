#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "playlab/encoder.hpp"
#include "playlab/session.hpp"
#include "playlab/tensor.hpp"

namespace playlab {

enum class ProbeSplit { Validation, Test };

// Frames plus labels for linear readout. Validation draws from the training
// house, test from a structurally identical house with fresh textures; both
// apply the same retinal-effect configuration as training.
struct ProbeDataset {
    ProbeSplit split = ProbeSplit::Validation;
    std::vector<RetinalFrame> frames;
    std::vector<int> object_labels;
    std::vector<int> background_labels;
    int n_classes = 0;
    int n_backgrounds = 0;
};

struct ProbeDatasetConfig {
    int size = 1200; // below 1200 is allowed for desk runs but warns
    SaccadeConfig saccade;
    ApertureConfig aperture;
    FoveationConfig foveation;
    DistanceFactor distance;
    RenderConfig render;
    bool quiet = false;
};

// Balanced over classes and backgrounds (counts within +-1); poses and
// saccades follow the training distributions; deterministic per seed.
ProbeDataset build_probe_dataset(ProbeSplit split, const SceneGraph& scene,
                                 const std::vector<ToyObject>& catalog,
                                 const ProbeDatasetConfig& cfg, uint64_t seed);

enum class ProbeTarget { Object, Background };

struct LinearProbe {
    Tensor<double> weight; // [n_classes, latent_dim]
    Tensor<double> bias;   // [n_classes]
    int n_classes = 0;
    ProbeTarget target = ProbeTarget::Object;
};

// Multinomial logistic regression on frozen latents: full-batch gradient
// descent with backtracking line search, L2 1e-4 on the weights, stopping
// when the loss improves by < 1e-6 over 10 iterations or at 5000 iterations.
LinearProbe fit_linear_probe(const Tensor<float>& latents, const std::vector<int>& labels,
                             int n_classes, ProbeTarget target = ProbeTarget::Object);

// Argmax-class accuracy of a fitted probe on the given latents.
double probe_accuracy_on(const LinearProbe& probe, const Tensor<float>& latents,
                         const std::vector<int>& labels);

// The evaluation protocol: a fixed 80/20 fit/evaluate split of the dataset
// (per split_seed), probe fitted on the 80, accuracy reported on the 20.
struct ProbeEvalResult {
    double accuracy = 0.0;
    LinearProbe probe;
};
ProbeEvalResult fit_and_eval_probe(const Tensor<float>& latents, const std::vector<int>& labels,
                                   int n_classes, ProbeTarget target, uint64_t split_seed);

// Per-checkpoint probe accuracies.
struct ProbeReport {
    int64_t step = 0;
    uint64_t seed = 0;
    int latent_dim = 0;
    double validation_object_accuracy = 0.0;
    double test_object_accuracy = 0.0;
    double validation_background_accuracy = 0.0;
    double test_background_accuracy = 0.0;
};

// Pixel-level gradient magnitude of a single-pair contrastive loss (anchor
// vs positive, the given frames as negatives), max over channels, normalized
// to [0, 1]. A zero encoder yields an all-zero map.
Image saliency_map(const EncoderParams<float>& params, const RetinalFrame& frame,
                   const RetinalFrame& positive,
                   const std::vector<const RetinalFrame*>& negatives, double tau);

} // namespace playlab
