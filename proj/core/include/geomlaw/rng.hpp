#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace geomlaw {

// Splittable counter-based seeding: every consumer derives its stream id from
// (master seed, purpose tag, replicate index).  Two streams with different
// tags or indices are statistically independent, and results do not depend on
// which thread ran which replicate.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::uint64_t index = 0);

// xoshiro256++ generator, fully deterministic across platforms.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01();

    double uniform(double a, double b);

    // Unbiased integer in [0, n); n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    // Exact Poisson sampling (chunked inversion, O(mean) uniforms).
    std::uint64_t poisson(double mean);

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t s_[4];
};

}  // namespace geomlaw
