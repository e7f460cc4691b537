#pragma once

#include <cstdint>

namespace qdlab::rng {

// splitmix64 finalizer; full-period, passes avalanche tests.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Counter-based stream: the value at (seed, stream, counter) is a pure
// function of its arguments, so Monte Carlo results do not depend on
// thread scheduling or evaluation order.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t counter) {
    std::uint64_t key = splitmix64(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
    return splitmix64(key + 0xbf58476d1ce4e5b9ull * counter);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(counter_hash(seed, stream, counter) >> 11) * 0x1.0p-53;
}

}  // namespace qdlab::rng
