#pragma once

#include <cmath>
#include <cstdint>

namespace atlas {

/// Stateless counter-based generator: every (seed, stream, counter) triple maps
/// to a fixed draw, so results do not depend on the order of evaluation.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
        std::uint64_t k = mix(seed_ ^ mix(stream + 0x3c6ef372fe94f82bULL));
        return mix(k ^ mix(counter ^ 0xa54ff53a5f1d36f1ULL));
    }

    /// Uniform on (0, 1), never 0 or 1.
    double uniform(std::uint64_t stream, std::uint64_t counter) const {
        return (static_cast<double>(bits(stream, counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal by Box-Muller (cosine branch) from two uniforms.
    double normal(std::uint64_t stream, std::uint64_t counter) const {
        double u1 = uniform(stream, 2 * counter);
        double u2 = uniform(stream, 2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Unit-rate exponential.
    double exponential(std::uint64_t stream, std::uint64_t counter) const {
        return -std::log(uniform(stream, counter));
    }

private:
    std::uint64_t seed_;
};

}  // namespace atlas
