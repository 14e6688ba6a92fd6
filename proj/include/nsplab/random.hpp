#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace nsplab {

/// Independent generator for the stream keyed by (seed, keys...). Trials
/// draw from rng_for(seed, {trial}) so results do not depend on evaluation
/// order or thread count.
inline std::mt19937_64 rng_for(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (keys.size() + 1));
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto k : keys) push(k);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

}  // namespace nsplab
