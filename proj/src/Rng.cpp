#include "curator/Rng.h"

#include <cmath>

namespace curator {

size_t Rng::uniformIndex(size_t n) {
    if (n <= 1) return 0;
    uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    while (true) {
        const uint64_t draw = gen_() & mask;
        if (draw < n) return static_cast<size_t>(draw);
    }
}

double Rng::normal() {
    if (hasCached_) {
        hasCached_ = false;
        return cached_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    cached_ = radius * std::sin(angle);
    hasCached_ = true;
    return radius * std::cos(angle);
}

uint64_t mixSeed(uint64_t base, uint64_t salt) {
    uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace curator
