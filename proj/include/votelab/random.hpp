#pragma once

#include <cstdint>
#include <random>

namespace votelab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent child seeds (per subset,
/// per trial) from a master seed before any work is dispatched.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace votelab
