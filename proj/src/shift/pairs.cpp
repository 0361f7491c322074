#include "chase/shift/pairs.hpp"

#include <string>

#include "chase/core/random.hpp"

namespace chase::shift {

std::vector<EntityPair> all_pairs(Index entities) {
  if (entities < 2) throw UsageError("entity pairs need E >= 2, got " + std::to_string(entities));
  std::vector<EntityPair> out;
  for (Index i = 0; i < entities; ++i)
    for (Index j = i + 1; j < entities; ++j) out.push_back({i, j});
  return out;
}

std::vector<EntityPair> sample_pairs(Index entities, Index m, std::uint64_t seed) {
  const auto pool = all_pairs(entities);
  if (m < 1) throw UsageError("sample_pairs: M must be >= 1, got " + std::to_string(m));
  auto rng = make_rng({seed, stream::pairs});
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::vector<EntityPair> out;
  out.reserve(static_cast<std::size_t>(m));
  for (Index k = 0; k < m; ++k) out.push_back(pool[pick(rng)]);
  return out;
}

}  // namespace chase::shift
