#pragma once

#include <cmath>
#include <cstdint>

namespace tomo::rng {

// SplitMix64 (Steele/Lea/Flood mixing constants). Streams are keyed, not
// sequential: pixel_stream(seed, row, col) derives an independent generator
// per pixel, so sampling results do not depend on iteration order or thread
// count. Bit-exact agreement with external packages is not a goal; cross-run
// determinism within this toolkit is.
struct Stream {
    uint64_t state;

    uint64_t next_u64() {
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in (0,1); 53-bit mantissa, never exactly 0
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }
};

inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline Stream seed_stream(uint64_t seed) { return Stream{mix64(seed)}; }

inline Stream pixel_stream(uint64_t seed, uint64_t row, uint64_t col) {
    uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ull);
    h = mix64(h ^ (row + 0xd1b54a32d192ed03ull));
    h = mix64(h ^ (col + 0x8cb92ba72f3d8dd7ull));
    return Stream{h};
}

// Poisson sampling: product-of-uniforms for small means, PTRD transformed
// rejection (Hoermann 1993) for large means. Stable up to mean ~1e9.
inline uint64_t poisson_small(Stream& s, double mean) {
    const double limit = std::exp(-mean);
    uint64_t k = 0;
    double prod = s.next_unit();
    while (prod > limit) {
        ++k;
        prod *= s.next_unit();
    }
    return k;
}

inline uint64_t poisson_ptrd(Stream& s, double mean) {
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        double u = s.next_unit() - 0.5;
        double v = s.next_unit();
        double us = 0.5 - std::fabs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r)
            return static_cast<uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us))
            continue;
        const double lhs =
            std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = kf * log_mean - mean - std::lgamma(kf + 1.0);
        if (lhs <= rhs)
            return static_cast<uint64_t>(kf);
    }
}

inline uint64_t poisson(Stream& s, double mean) {
    if (mean <= 0.0)
        return 0;
    if (mean < 10.0)
        return poisson_small(s, mean);
    return poisson_ptrd(s, mean);
}

} // namespace tomo::rng
