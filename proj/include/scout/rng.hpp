#pragma once

#include <cstdint>
#include <cmath>

namespace scout {

// SplitMix64 finalizer; the basis for all randomness in the project.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

/// Counter-based generator: draw i is a pure function of (seed, i), so
/// streams can be split per task and consumed concurrently without shared
/// state. Output does not depend on the platform's library distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed) {}

    std::uint64_t next_u64() {
        return mix64(seed_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        // 128-bit multiply scaling; bias is negligible for n << 2^64.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Standard normal via Box-Muller (one value per call, no cache).
    double normal() {
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    /// Child generator for an independent named stream.
    Rng derive(std::uint64_t stream) const {
        return Rng(mix64(seed_ ^ mix64(stream + 0x9e3779b97f4a7c15ULL)));
    }

    Rng derive(std::uint64_t a, std::uint64_t b) const {
        return derive(a).derive(b);
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace scout
