#include "geomlaw/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace geomlaw {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::uint64_t index) {
    std::uint64_t state = master;
    splitmix64(state);
    state ^= fnv1a(tag);
    splitmix64(state);
    state ^= index * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull;
    return splitmix64(state);
}

RngStream::RngStream(std::uint64_t seed) {
    std::uint64_t state = seed;
    for (auto& word : s_) word = splitmix64(state);
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) {
    return a + (b - a) * uniform01();
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
    // rejection against the largest multiple of n to avoid modulo bias
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

std::uint64_t RngStream::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw std::invalid_argument("poisson: mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    // Knuth inversion with the exponent consumed in chunks so the running
    // product never underflows for large means.
    const double chunk = 500.0;
    double remaining = mean;
    double p = 1.0;
    std::uint64_t k = 0;
    while (true) {
        p *= uniform01();
        while (p < 1.0 && remaining > 0.0) {
            if (remaining > chunk) {
                p *= std::exp(chunk);
                remaining -= chunk;
            } else {
                p *= std::exp(remaining);
                remaining = 0.0;
            }
        }
        if (remaining == 0.0 && p <= 1.0) return k;
        ++k;
    }
}

}  // namespace geomlaw
