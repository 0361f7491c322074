#pragma once

#include <cstdint>
#include <vector>

#include "chase/core/tensor.hpp"

namespace chase::shift {

/// Unordered entity pair, i < j.
struct EntityPair {
  Index i = 0;
  Index j = 1;
  friend bool operator==(const EntityPair&, const EntityPair&) = default;
};

/// All C(E, 2) pairs in lexicographic order.
std::vector<EntityPair> all_pairs(Index entities);

/// M pairs drawn uniformly with replacement. Throws UsageError for E < 2 or M < 1.
std::vector<EntityPair> sample_pairs(Index entities, Index m, std::uint64_t seed);

}  // namespace chase::shift
