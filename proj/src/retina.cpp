#include "playlab/retina.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "playlab/error.hpp"

namespace playlab {

namespace {

// Separable Gaussian with clamp-to-edge borders, written in difference form
//   out = x + sum_k w_k * (x_k - x)
// which preserves constant regions bit-exactly for any weight normalization.
Image gaussian_blur(const Image& src, float sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0f * sigma)));
    std::vector<float> weights(static_cast<size_t>(radius) + 1);
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k)
        sum += std::exp(-0.5 * static_cast<double>(k) * k / (static_cast<double>(sigma) * sigma));
    for (int k = 0; k <= radius; ++k)
        weights[static_cast<size_t>(k)] = static_cast<float>(
            std::exp(-0.5 * static_cast<double>(k) * k / (static_cast<double>(sigma) * sigma)) / sum);

    const int w = src.width, h = src.height, c = src.channels;
    Image tmp(w, h, c);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < c; ++ch) {
                const float center = src.at(x, y, ch);
                float acc = 0.0f;
                for (int k = -radius; k <= radius; ++k) {
                    const int xi = std::clamp(x + k, 0, w - 1);
                    acc += weights[static_cast<size_t>(std::abs(k))] * (src.at(xi, y, ch) - center);
                }
                tmp.at(x, y, ch) = center + acc;
            }
    Image out(w, h, c);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < c; ++ch) {
                const float center = tmp.at(x, y, ch);
                float acc = 0.0f;
                for (int k = -radius; k <= radius; ++k) {
                    const int yi = std::clamp(y + k, 0, h - 1);
                    acc += weights[static_cast<size_t>(std::abs(k))] * (tmp.at(x, yi, ch) - center);
                }
                out.at(x, y, ch) = std::clamp(center + acc, 0.0f, 1.0f);
            }
    return out;
}

} // namespace

float circle_of_confusion_px(float depth, float focus_depth, float aperture_number) {
    const float diopter_gap = std::fabs(1.0f / depth - 1.0f / focus_depth);
    return std::clamp(kCocConstant / aperture_number * diopter_gap, 0.0f, kCocMaxRadiusPx);
}

std::pair<float, float> sample_saccade(const SaccadeConfig& cfg, Rng& rng) {
    if (cfg.amplitude_deg < 0.0f || cfg.amplitude_deg > 10.0f)
        throw ConfigError("sample_saccade: amplitude outside [0, 10]");
    const float yaw = cfg.amplitude_deg * static_cast<float>(rng.normal());
    const float pitch = cfg.amplitude_deg * static_cast<float>(rng.normal());
    return {yaw, pitch};
}

RetinalFrame apply_depth_of_field(const RetinalFrame& frame, const ApertureConfig& cfg) {
    if (!cfg.enabled) return frame;
    if (cfg.aperture_number < 0.5f || cfg.aperture_number > 20.0f)
        throw ConfigError("apply_depth_of_field: aperture number outside [0.5, 20]");
    if (frame.depth.size() != frame.rgb.pixel_count())
        throw InputError("apply_depth_of_field: frame has no valid depth channel");
    if (frame.focus_depth <= 0.0f)
        throw InputError("apply_depth_of_field: non-positive focus depth");

    const size_t n = frame.depth.size();
    std::vector<float> radius(n);
    float d_min = 1.0f / frame.depth[0], d_max = d_min;
    bool any_blur = false;
    for (size_t i = 0; i < n; ++i) {
        const float d = 1.0f / frame.depth[i];
        d_min = std::min(d_min, d);
        d_max = std::max(d_max, d);
        radius[i] = circle_of_confusion_px(frame.depth[i], frame.focus_depth, cfg.aperture_number);
        any_blur = any_blur || radius[i] >= kCocCopyThresholdPx;
    }
    if (!any_blur) return frame;

    // Diopter-space bins; each used bin blurs the whole image once and the
    // bin's pixels gather from that result.
    const float bin_width = std::max((d_max - d_min) / static_cast<float>(kCocDepthBins), 1e-9f);
    const float focus_diopter = 1.0f / frame.focus_depth;
    std::vector<Image> bin_images(kCocDepthBins);
    std::vector<bool> bin_ready(kCocDepthBins, false);

    RetinalFrame out = frame;
    for (int y = 0; y < frame.height(); ++y)
        for (int x = 0; x < frame.width(); ++x) {
            const size_t idx = static_cast<size_t>(y) * frame.width() + x;
            if (radius[idx] < kCocCopyThresholdPx) continue; // in-focus pass-through
            const float d = 1.0f / frame.depth[idx];
            const int bin = std::clamp(static_cast<int>((d - d_min) / bin_width), 0,
                                       kCocDepthBins - 1);
            if (!bin_ready[static_cast<size_t>(bin)]) {
                const float bin_diopter = d_min + (static_cast<float>(bin) + 0.5f) * bin_width;
                const float sigma =
                    std::clamp(kCocConstant / cfg.aperture_number *
                                   std::fabs(bin_diopter - focus_diopter),
                               0.05f, kCocMaxRadiusPx);
                bin_images[static_cast<size_t>(bin)] = gaussian_blur(frame.rgb, sigma);
                bin_ready[static_cast<size_t>(bin)] = true;
            }
            const Image& blurred = bin_images[static_cast<size_t>(bin)];
            for (int ch = 0; ch < 3; ++ch) out.rgb.at(x, y, ch) = blurred.at(x, y, ch);
        }
    return out;
}

RetinalFrame apply_foveation(const RetinalFrame& frame, const FoveationConfig& cfg) {
    if (!cfg.enabled) return frame;
    if (cfg.levels < 2 || cfg.levels > 6)
        throw ConfigError("apply_foveation: levels outside [2, 6]");
    if (frame.gaze_px[0] < 0 || frame.gaze_px[0] >= frame.width() || frame.gaze_px[1] < 0 ||
        frame.gaze_px[1] >= frame.height())
        throw InputError("apply_foveation: gaze point outside the image");

    // Gaussian stack standing in for the resolution pyramid: level k carries
    // the content of a 1/2^k resolution image.
    std::vector<Image> stack;
    stack.reserve(static_cast<size_t>(cfg.levels));
    stack.push_back(frame.rgb);
    for (int k = 1; k < cfg.levels; ++k)
        stack.push_back(gaussian_blur(frame.rgb, std::ldexp(1.0f, k - 1)));

    const float gaze_x = static_cast<float>(frame.gaze_px[0]) + 0.5f;
    const float gaze_y = static_cast<float>(frame.gaze_px[1]) + 0.5f;
    const float fovea_deg = cfg.half_res_eccentricity_deg * 0.25f;

    RetinalFrame out = frame;
    for (int y = 0; y < frame.height(); ++y)
        for (int x = 0; x < frame.width(); ++x) {
            const float ecc = pixel_eccentricity_deg(frame.width(), frame.height(),
                                                     frame.vertical_fov_deg, gaze_x, gaze_y,
                                                     static_cast<float>(x) + 0.5f,
                                                     static_cast<float>(y) + 0.5f);
            if (ecc < fovea_deg) continue; // foveal zone: exact copy
            const float level =
                std::clamp(std::log2(1.0f + ecc / cfg.half_res_eccentricity_deg), 0.0f,
                           static_cast<float>(cfg.levels - 1));
            const int k0 = static_cast<int>(level);
            const int k1 = std::min(k0 + 1, cfg.levels - 1);
            const float t = level - static_cast<float>(k0);
            for (int ch = 0; ch < 3; ++ch) {
                const float a = stack[static_cast<size_t>(k0)].at(x, y, ch);
                const float b = stack[static_cast<size_t>(k1)].at(x, y, ch);
                out.rgb.at(x, y, ch) = std::clamp(a + t * (b - a), 0.0f, 1.0f);
            }
        }
    return out;
}

RetinalFrame apply_retinal_pipeline(const RetinalFrame& frame, const ApertureConfig& aperture,
                                    const FoveationConfig& foveation) {
    return apply_foveation(apply_depth_of_field(frame, aperture), foveation);
}

} // namespace playlab
