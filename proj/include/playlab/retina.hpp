#pragma once

#include <utility>

#include "playlab/renderer.hpp"
#include "playlab/rng.hpp"

namespace playlab {

struct SaccadeConfig {
    float amplitude_deg = 3.0f; // per-axis standard deviation S, degrees
};

struct ApertureConfig {
    float aperture_number = 20.0f; // 20 is the effectively-clear baseline
    bool enabled = true;
};

struct FoveationConfig {
    bool enabled = false;
    int levels = 4;
    float half_res_eccentricity_deg = 8.0f;
};

// Thin-lens circle of confusion, in pixels of blur std:
//   r(z) = clamp(K / aperture * |1/z - 1/focus|, 0, r_max)
// K is calibrated so aperture 20 stays clear over typical scene depths while
// aperture 1 blurs a 4 m background by >= 3 px at 2 m focus.
inline constexpr float kCocConstant = 13.0f;
inline constexpr float kCocMaxRadiusPx = 8.0f;
inline constexpr float kCocCopyThresholdPx = 0.25f; // below this, pixels pass through
inline constexpr int kCocDepthBins = 16;

float circle_of_confusion_px(float depth, float focus_depth, float aperture_number);

// Gaze offset in degrees: each axis ~ N(0, S^2). S = 0 returns exactly (0,0).
std::pair<float, float> sample_saccade(const SaccadeConfig& cfg, Rng& rng);

// Depth-binned Gaussian defocus. Pixels whose exact blur radius is under the
// copy threshold pass through bit-identically.
RetinalFrame apply_depth_of_field(const RetinalFrame& frame, const ApertureConfig& cfg);

// Gaze-contingent resampling: a Gaussian stack of `levels` progressively
// blurred images, interpolated per pixel by log2(1 + ecc/half_res_ecc).
// Pixels closer to the gaze than half_res_ecc/4 are copied from the input.
RetinalFrame apply_foveation(const RetinalFrame& frame, const FoveationConfig& cfg);

// Fixed composition: depth of field (scene optics) first, then foveation
// (retinal sampling). Disabled stages are identities.
RetinalFrame apply_retinal_pipeline(const RetinalFrame& frame, const ApertureConfig& aperture,
                                    const FoveationConfig& foveation);

} // namespace playlab
