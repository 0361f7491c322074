#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "chase/core/ops.hpp"
#include "chase/shift/pairs.hpp"

namespace chase::disc {

/// Median pairwise Euclidean distance over the pooled rows of a and b
/// (median heuristic). Falls back to 1 when the median is 0.
double median_bandwidth(const TensorXd& a, const TensorXd& b);

/// Biased V-statistic MMD^2 with an RBF kernel exp(-|x - y|^2 / (2 sigma^2)):
/// mean k(a,a) + mean k(b,b) - 2 mean k(a,b). a is [n,C], b is [m,C].
/// Arguments are put in a canonical order first, so swapping them gives the
/// identical result. Throws UsageError on empty sets, DimensionError on a
/// width mismatch.
Value mmd_sq(const Value& a, const Value& b, double bandwidth);
/// Bandwidth from the median heuristic, treated as a constant.
Value mmd_sq(const Value& a, const Value& b);

struct MpmmdOptions {
  Index points_per_entity = 256;
  std::uint64_t subsample_seed = 0;
  /// Overrides the per-pair median heuristic.
  std::optional<double> bandwidth;
};

/// Coordinate points of entity e pooled over (N, T, J): [N*T*J, C]. When there
/// are more than points_per_entity, the same seeded subset of (n, t, j)
/// positions is kept for every entity.
Value entity_points(const Value& x_hat, Index entity, const MpmmdOptions& opts);

/// Mean of mmd_sq over the given entity pairs of an (N, C, T, J, E) batch.
/// Throws UsageError when E < 2 or pairs is empty.
Value mpmmd_loss(const Value& x_hat, std::span<const shift::EntityPair> pairs, const MpmmdOptions& opts = {});

}  // namespace chase::disc
