#pragma once

#include <cstdint>
#include <random>

namespace orient {

/// Engine used everywhere randomness is needed. Pure functions take it by
/// reference; reproducibility is a function of the seed only.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for an independent stream, derived from a base seed and a
/// (stream, index) counter pair. Used to give every trial, cell and
/// observation its own generator so parallel schedules cannot change results.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0) {
  return Rng(derive_seed(base, stream, index));
}

}  // namespace orient
