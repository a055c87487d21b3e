#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace playlab {

// Deterministic random stream. The engine is std::mt19937_64 (fully specified
// by the standard) and all distributions are implemented here by hand, so the
// same seed yields the same values on every platform and standard library.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed), base_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1), 53 bits of entropy.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
    uint64_t uniform_int(uint64_t n) {
        if (n <= 1) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    // Standard normal via Box-Muller. Consumes two uniforms per call and
    // keeps no cached state, so interleaved streams stay reproducible.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Derives an independent child stream. Tags keep the per-purpose streams
    // (worldgen, sessions, dropout, ...) decoupled from one another.
    Rng child(uint64_t tag) {
        const uint64_t s = splitmix64(base_ ^ splitmix64(tag + 0x9e3779b97f4a7c15ull));
        return Rng(s, s);
    }

    static uint64_t splitmix64(uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    // FNV-1a, used for tagging child streams by name and hashing configs.
    static uint64_t hash_str(std::string_view s) {
        uint64_t h = 1469598103934665603ull;
        for (const char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        return h;
    }

    Rng child(std::string_view tag) { return child(hash_str(tag)); }

private:
    Rng(uint64_t seed, uint64_t base) : engine_(seed), base_(base) {}

    std::mt19937_64 engine_;
    uint64_t base_ = 0;
};

} // namespace playlab
