#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace nfcorr {

// SplitMix64 step (Steele/Lea/Vigna). Used to whiten seeds before they reach
// the main engine so that nearby (seed, counter) pairs give decorrelated
// streams.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic random stream based on mt19937_64. The uniform/exponential
// mappings are implemented here instead of via std:: distributions so that
// the produced values are identical across standard library implementations.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    // Counter-based derivation: the stream for (seed, counter) is fully
    // determined by the pair, so trials can run in any order or in parallel.
    static RandomStream derive(std::uint64_t seed, std::uint64_t counter) {
        std::uint64_t s = seed ^ (counter * 0xD1342543DE82EF95ULL + 0x632BE59BD9B4E019ULL);
        std::uint64_t a = splitmix64_next(s);
        std::uint64_t b = splitmix64_next(s);
        return RandomStream(a ^ (b << 1));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Exponential with the given mean via inversion; log1p keeps the tail exact.
    double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

private:
    std::mt19937_64 engine_;
};

}  // namespace nfcorr
