#ifndef SENTINEL_RNG_HPP
#define SENTINEL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace sentinel {

/**
 * Deterministic counter-style random stream built on splitmix64.
 *
 * Streams are derived from (seed, label[, sub-label]) so every transformer,
 * sensor and experiment cell owns an independent stream; adding a consumer
 * never perturbs another consumer's draws. All distributions are generated
 * in-house so output is bit-identical across platforms.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {}

    /// Derive an independent stream from a parent seed and a string label.
    static Rng derive(std::uint64_t seed, std::string_view label) {
        std::uint64_t h = 0xcbf29ce484222325ull ^ mix(seed);
        for (char c : label) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        return Rng(mix(h));
    }

    static Rng derive(std::uint64_t seed, std::string_view label, std::string_view sub) {
        Rng parent = derive(seed, label);
        return derive(parent.next(), sub);
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n).
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
    }

    /// Standard normal via Box-Muller (no caching, two uniforms per draw).
    double gauss() {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double gauss(double mean, double stddev) { return mean + stddev * gauss(); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace sentinel

#endif
