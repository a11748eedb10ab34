#pragma once

#include <cstdint>

namespace qecw {

/// Deterministic generator used for all sampling.
///
/// The algorithm is pinned (splitmix64) so that a (program, seed) pair
/// reproduces bit-identically across platforms and library versions; the
/// identifier below is reported in machine-readable output. Child
/// generators are derived from (master seed, stream, index) so Monte Carlo
/// trials give identical results at any parallelism level.
class Rng {
  public:
    static constexpr const char* kAlgorithm = "qecw.splitmix64.v1";

    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_unit() < p; }

    /// Generator for trial `index` of stream `stream` under `master`.
    static Rng derive(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
        std::uint64_t h = mix(master ^ (0xA3EC647659359ACDull * (stream + 1)));
        h = mix(h + index * 0x9E3779B97F4A7C15ull);
        return Rng(h);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace qecw
