// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_RNG_H
#define EYEVOL_RNG_H

#include <cstdint>

#include "eyevol/vecmath.h"

namespace eyevol {

// Counter-free splitmix64 step, used for seeding and stream splitting.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic seed derivation for substreams (per pixel, per ray part).
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (salt + 0x51ab5e49ULL));
    return splitmix64(s);
}

// Small deterministic generator (xoshiro-style output of splitmix64 stream).
// Renders seed one instance per pixel so results are independent of the
// thread schedule.
class Rng {
public:
    explicit Rng(uint64_t seed = 0) : state_(seed) {
        // Decorrelate nearby seeds.
        splitmix64(state_);
    }

    static Rng for_stream(uint64_t seed, uint64_t stream) {
        uint64_t s = seed;
        splitmix64(s);
        s ^= 0x632be59bd9b4e019ULL * (stream + 1);
        return Rng(s);
    }

    uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1).
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform direction on the unit sphere.
    Vec3 unit_vector() {
        double z = uniform(-1.0, 1.0);
        double phi = uniform(0.0, 2.0 * M_PI);
        double s = std::sqrt(std::fmax(0.0, 1.0 - z * z));
        return {s * std::cos(phi), s * std::sin(phi), z};
    }

private:
    uint64_t state_;
};

}  // namespace eyevol

#endif
