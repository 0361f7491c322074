#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace chase {

/// Independent engine for (seed, stream ids...). Each randomised component
/// draws from its own stream so results do not depend on call order.
inline std::mt19937_64 make_rng(std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  words.reserve(keys.size() * 2);
  for (std::uint64_t k : keys) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

/// One 64-bit seed derived from (seed, stream ids...), for handing to
/// functions that take a plain seed.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) { return make_rng(keys)(); }

// Stream identifiers.
namespace stream {
inline constexpr std::uint64_t synth_sample = 1;
inline constexpr std::uint64_t synth_pose = 2;
inline constexpr std::uint64_t augment_shift = 3;
inline constexpr std::uint64_t augment_permute = 4;
inline constexpr std::uint64_t corrupt = 5;
inline constexpr std::uint64_t pairs = 6;
inline constexpr std::uint64_t subsample = 7;
inline constexpr std::uint64_t shuffle = 8;
inline constexpr std::uint64_t init = 9;
inline constexpr std::uint64_t report = 10;
inline constexpr std::uint64_t train_augment = 11;
}  // namespace stream

}  // namespace chase
