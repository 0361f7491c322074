#pragma once

#include <cstdint>
#include <vector>

#include "chase/skel/sequence.hpp"

namespace chase::skel {

/// Adds one vector drawn uniformly from [-range, range]^C to every point.
SkeletonSequence augment_random_shift(const SkeletonSequence& x, double range, std::uint64_t seed);

/// Applies a uniformly random permutation to the entity axis. If `applied` is
/// non-null it receives the permutation (output entity e = input entity applied[e]).
SkeletonSequence augment_entity_permute(const SkeletonSequence& x, std::uint64_t seed,
                                        std::vector<Index>* applied = nullptr);

/// Gaussian coordinate noise followed by joint masking.
struct CorruptionConfig {
  double noise_sigma = 0.0;
  double mask_prob = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Adds i.i.d. N(0, sigma^2) noise to every coordinate, then zeroes all C
/// coordinates of each (t, j, e) joint independently with probability mask_prob.
SkeletonSequence corrupt(const SkeletonSequence& x, const CorruptionConfig& cfg);

}  // namespace chase::skel
