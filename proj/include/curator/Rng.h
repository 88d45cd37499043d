#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace curator {

// Deterministic random source. mt19937_64 is fully specified by the
// standard, but the std distributions are not, so every draw primitive
// is implemented here. Same seed gives the same stream on every
// platform and build.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t nextU64() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Uniform in [0, n). Bitmask rejection, unbiased.
    size_t uniformIndex(size_t n);

    // Standard normal via Box-Muller; the second value of each pair is
    // cached so consecutive draws consume the underlying stream evenly.
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // +1 or -1 with equal probability.
    double sign() { return (gen_() & 1u) ? 1.0 : -1.0; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (size_t i = v.size() - 1; i > 0; --i) {
            const size_t j = uniformIndex(i + 1);
            std::swap(v[i], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
    bool hasCached_ = false;
    double cached_ = 0.0;
};

// Stable seed derivation for independent sub-streams (splitmix64 finalizer).
uint64_t mixSeed(uint64_t base, uint64_t salt);

}  // namespace curator
