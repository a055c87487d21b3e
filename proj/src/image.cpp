#include "playlab/image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "playlab/error.hpp"

namespace playlab {

void write_ppm(const std::string& path, const Image& rgb) {
    if (rgb.channels != 3) throw InputError("write_ppm: expected 3-channel image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("write_ppm: cannot open " + path);
    out << "P6\n" << rgb.width << " " << rgb.height << "\n255\n";
    std::vector<unsigned char> row(static_cast<size_t>(rgb.width) * 3);
    for (int y = 0; y < rgb.height; ++y) {
        for (int x = 0; x < rgb.width; ++x)
            for (int c = 0; c < 3; ++c) {
                const float v = std::clamp(rgb.at(x, y, c), 0.0f, 1.0f);
                row[static_cast<size_t>(x) * 3 + c] =
                    static_cast<unsigned char>(std::lround(v * 255.0f));
            }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw InputError("write_ppm: short write to " + path);
}

Image read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("read_ppm: cannot open " + path);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P6" || maxval != 255 || w <= 0 || h <= 0)
        throw InputError("read_ppm: unsupported PPM header in " + path);
    in.get(); // single whitespace after header
    Image img(w, h, 3);
    std::vector<unsigned char> raw(static_cast<size_t>(w) * h * 3);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw InputError("read_ppm: truncated pixel data in " + path);
    for (size_t i = 0; i < raw.size(); ++i)
        img.data[i] = static_cast<float>(raw[i]) / 255.0f;
    return img;
}

namespace {

// Depth files are little-endian on disk regardless of host order.
void to_little_endian(std::vector<uint32_t>& words) {
    if constexpr (std::endian::native == std::endian::big) {
        for (auto& w : words)
            w = ((w & 0xffu) << 24) | ((w & 0xff00u) << 8) | ((w >> 8) & 0xff00u) | (w >> 24);
    }
}

} // namespace

void write_depth_raw(const std::string& path, const std::vector<float>& depth) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("write_depth_raw: cannot open " + path);
    std::vector<uint32_t> words(depth.size());
    std::memcpy(words.data(), depth.data(), depth.size() * sizeof(float));
    to_little_endian(words);
    out.write(reinterpret_cast<const char*>(words.data()),
              static_cast<std::streamsize>(words.size() * sizeof(uint32_t)));
    if (!out) throw InputError("write_depth_raw: short write to " + path);
}

std::vector<float> read_depth_raw(const std::string& path, size_t expected_count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("read_depth_raw: cannot open " + path);
    std::vector<uint32_t> words(expected_count);
    in.read(reinterpret_cast<char*>(words.data()),
            static_cast<std::streamsize>(expected_count * sizeof(uint32_t)));
    if (!in) throw InputError("read_depth_raw: truncated file " + path);
    to_little_endian(words);
    std::vector<float> depth(expected_count);
    std::memcpy(depth.data(), words.data(), expected_count * sizeof(float));
    return depth;
}

} // namespace playlab
