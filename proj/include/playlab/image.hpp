#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace playlab {

// Dense row-major float image, values nominally in [0, 1].
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, int c, float fill = 0.0f)
        : width(w), height(h), channels(c),
          data(static_cast<size_t>(w) * h * c, fill) {}

    float& at(int x, int y, int c) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    float at(int x, int y, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool empty() const { return data.empty(); }
};

// Binary PPM (P6, 8-bit). Values are clamped to [0,1] and rounded to bytes.
void write_ppm(const std::string& path, const Image& rgb);
Image read_ppm(const std::string& path);

// Sidecar depth dump: raw 32-bit little-endian floats, row-major, no header.
// Dimensions are implied by the paired PPM.
void write_depth_raw(const std::string& path, const std::vector<float>& depth);
std::vector<float> read_depth_raw(const std::string& path, size_t expected_count);

} // namespace playlab
