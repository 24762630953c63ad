#pragma once

#include <cstdint>
#include <random>

namespace qpmix {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent stream for work item `index` under `master_seed`. The mapping is
/// fixed, so results do not depend on how items are scheduled across threads.
inline Rng derive_stream(uint64_t master_seed, uint64_t index) {
    std::seed_seq seq{
        static_cast<uint32_t>(splitmix64(master_seed)),
        static_cast<uint32_t>(splitmix64(master_seed) >> 32),
        static_cast<uint32_t>(splitmix64(index ^ 0xA5A5A5A5A5A5A5A5ULL)),
        static_cast<uint32_t>(splitmix64(index ^ 0xA5A5A5A5A5A5A5A5ULL) >> 32)};
    return Rng(seq);
}

/// Uniform double in [0, 1) with 53 random bits. Portable across standard libraries,
/// unlike std::uniform_real_distribution.
inline double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace qpmix
