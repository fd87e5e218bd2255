#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace monogam::rng {

// All randomness in the library flows through std::mt19937_64 seeded
// explicitly. The raw generator output is pinned by the C++ standard, and the
// draws below avoid std::uniform_int_distribution / std::shuffle /
// std::gamma_distribution, whose sequences are implementation-defined.
// Stream semantics: one generator per purpose (split, minibatch shuffle,
// probe sampling, case generation), seeded with the user seed, consumed
// strictly in document order by the functions below.

using Engine = std::mt19937_64;

// Uniform integer in [0, n) by rejection sampling on the high bits.
inline std::uint64_t bounded(Engine& g, std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
        r = g();
    } while (r >= limit);
    return r % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double unit(Engine& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& g, double lo, double hi) {
    return lo + (hi - lo) * unit(g);
}

// Fisher-Yates, descending index order.
template <typename T>
void shuffle(std::vector<T>& v, Engine& g) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(bounded(g, i));
        std::swap(v[i - 1], v[j]);
    }
}

// Gamma(k) for small integer shape as a sum of exponentials.
inline double gamma_int(Engine& g, int shape) {
    double acc = 0.0;
    for (int i = 0; i < shape; ++i) {
        acc += -std::log(1.0 - unit(g));
    }
    return acc;
}

// Symmetric Dirichlet with integer concentration alpha.
inline std::vector<double> dirichlet(Engine& g, std::size_t n, int alpha) {
    std::vector<double> out(n);
    double sum = 0.0;
    for (auto& x : out) {
        x = gamma_int(g, alpha);
        sum += x;
    }
    for (auto& x : out) x /= sum;
    return out;
}

}  // namespace monogam::rng
