#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "prefforge/common.hpp"

namespace prefforge {

// splitmix64 finalizer; used to derive independent seed streams from one root.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a over the tag string, folded into the seed. Stable across platforms.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return mix64(seed ^ h);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t a) {
    return mix64(derive_seed(seed, tag) + 0x9e3779b97f4a7c15ULL * (a + 1));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t a,
                                 std::uint64_t b) {
    return mix64(derive_seed(seed, tag, a) + 0xd1342543de82ef95ULL * (b + 1));
}

// mt19937_64 with hand-rolled distributions so streams do not depend on the
// standard library's implementation-defined distribution algorithms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_index(std::uint64_t n) {
        require(n > 0, "uniform_index: n must be positive");
        // Rejection to avoid modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    // Box-Muller; computes a fresh pair every call so the stream position
    // never depends on call parity.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Normal clipped by rejection to |x| <= 2 sigma, the usual embedding-table init.
    double truncated_normal(double stddev) {
        for (;;) {
            const double x = normal();
            if (std::fabs(x) <= 2.0) return x * stddev;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Uniform direction on the unit sphere in `dim` dimensions.
    std::vector<double> unit_vector(std::size_t dim) {
        require(dim > 0, "unit_vector: dim must be positive");
        std::vector<double> v(dim);
        for (;;) {
            double norm2 = 0.0;
            for (auto& x : v) {
                x = normal();
                norm2 += x * x;
            }
            if (norm2 > 1e-24) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (auto& x : v) x *= inv;
                return v;
            }
        }
    }

    // Uniform sample from the ball of given radius.
    std::vector<double> ball_vector(std::size_t dim, double radius) {
        std::vector<double> v = unit_vector(dim);
        const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(dim));
        for (auto& x : v) x *= r;
        return v;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace prefforge
