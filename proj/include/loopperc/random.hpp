#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace loopperc {

// Engine used by every API that takes an explicit RNG state.
using Rng = std::mt19937_64;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Key of the i-th child (or i-th replica, i-th stream) below `parent`.
inline constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index) {
    return mix64(parent ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// SplitMix64 as a UniformRandomBitGenerator. Cheap to seed, which matters
// because the lazy explorer seeds one stream per edge.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// Uniform double in [0,1) with 53 random bits; independent of the
// standard library's distribution implementation.
template <class Gen>
double uniform01(Gen& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Replica i of a run seeded with `master` always gets the same engine.
inline Rng replica_rng(std::uint64_t master, std::uint64_t replica) {
    return Rng(derive_key(master, replica));
}

} // namespace loopperc
