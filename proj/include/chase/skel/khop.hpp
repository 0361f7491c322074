#pragma once

#include <optional>
#include <vector>

#include "chase/skel/sequence.hpp"

namespace chase::skel {

/// Rooted joint tree. parent[i] is empty for roots. P[i][parent(i)] = 1.
class GraphPrior {
 public:
  /// Throws ConfigError on out-of-range parents or cycles.
  explicit GraphPrior(std::vector<std::optional<Index>> parent);

  /// 0 <- 1 <- 2 <- ... <- J-1, rooted at joint 0.
  static GraphPrior chain(Index joints);

  Index num_joints() const { return static_cast<Index>(parent_.size()); }
  const std::vector<std::optional<Index>>& parent() const { return parent_; }
  /// Binary adjacency P (J x J).
  RowMatrix<double> adjacency() const;
  /// Largest hop count from any joint to its root.
  Index depth() const { return depth_; }

 private:
  std::vector<std::optional<Index>> parent_;
  Index depth_ = 0;
};

/// (I - P^k) X_t per frame and entity: joints with a k-th ancestor become the
/// vector from that ancestor; others keep their coordinates.
SkeletonSequence khop_bones(const SkeletonSequence& x, const GraphPrior& prior, Index k);

}  // namespace chase::skel
