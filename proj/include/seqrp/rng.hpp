#pragma once

#include <cstdint>
#include <random>

namespace seqrp {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based seed derivation: stream `stream` of item `index` under `master`.
// Depends only on its arguments, so any item can be replayed in isolation.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                    std::uint64_t stream = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ index) + stream);
}

inline Rng make_rng(std::uint64_t master, std::uint64_t index = 0, std::uint64_t stream = 0) {
  return Rng(derive_seed(master, index, stream));
}

}  // namespace seqrp
