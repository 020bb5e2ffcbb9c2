// SPDX-License-Identifier: Apache-2.0
#pragma once

// Counter-based stream splitting: trial i of a run always sees the same
// generator state, whichever worker executes it.

#include <cstdint>
#include <random>

namespace mmwcov {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(trial_index ^ 0x6A09E667F3BCC909ULL));
}

inline std::mt19937_64 trial_rng(std::uint64_t master_seed, std::uint64_t trial_index) {
  return std::mt19937_64(trial_seed(master_seed, trial_index));
}

}  // namespace mmwcov
