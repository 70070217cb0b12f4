#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace aot {

// std::mt19937_64 has a standard-specified sequence, but the distribution
// adapters do not. Draws below go through the raw 64-bit stream so seeded
// runs reproduce bit-identically across standard libraries.

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    return rng() % n;
}

inline double normal01(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Symmetric Dirichlet(1) weights via normalized exponentials.
inline std::vector<double> dirichlet_weights(std::mt19937_64& rng, std::size_t k) {
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& wi : w) {
        double u = uniform01(rng);
        if (u < 1e-300) u = 1e-300;
        wi = -std::log(u);
        total += wi;
    }
    for (auto& wi : w) wi /= total;
    return w;
}

} // namespace aot
