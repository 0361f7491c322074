#include "chase/skel/khop.hpp"

namespace chase::skel {

GraphPrior::GraphPrior(std::vector<std::optional<Index>> parent) : parent_(std::move(parent)) {
  const Index J = num_joints();
  if (J < 1) throw ConfigError("graph prior needs at least one joint");
  for (Index i = 0; i < J; ++i) {
    const auto& p = parent_[i];
    if (p && (*p < 0 || *p >= J || *p == i)) {
      throw ConfigError("graph prior: joint " + std::to_string(i) + " has invalid parent");
    }
  }
  for (Index i = 0; i < J; ++i) {
    Index hops = 0;
    for (auto p = parent_[i]; p; p = parent_[*p]) {
      if (++hops > J) throw ConfigError("graph prior: cycle through joint " + std::to_string(i));
    }
    depth_ = std::max(depth_, hops);
  }
}

GraphPrior GraphPrior::chain(Index joints) {
  std::vector<std::optional<Index>> parent(static_cast<std::size_t>(joints));
  for (Index i = 1; i < joints; ++i) parent[i] = i - 1;
  return GraphPrior(std::move(parent));
}

RowMatrix<double> GraphPrior::adjacency() const {
  const Index J = num_joints();
  RowMatrix<double> P = RowMatrix<double>::Zero(J, J);
  for (Index i = 0; i < J; ++i) {
    if (parent_[i]) P(i, *parent_[i]) = 1.0;
  }
  return P;
}

SkeletonSequence khop_bones(const SkeletonSequence& x, const GraphPrior& prior, Index k) {
  if (k < 1) throw UsageError("khop_bones: k must be >= 1");
  if (prior.num_joints() != x.joints()) {
    throw DimensionError("khop_bones: graph has " + std::to_string(prior.num_joints()) + " joints, sequence " +
                         std::to_string(x.joints()));
  }
  RowMatrix<double> Pk = RowMatrix<double>::Identity(x.joints(), x.joints());
  const RowMatrix<double> P = prior.adjacency();
  for (Index i = 0; i < k; ++i) Pk = Pk * P;
  const RowMatrix<double> op = RowMatrix<double>::Identity(x.joints(), x.joints()) - Pk;

  SkeletonSequence out = x;
  const Index C = x.channels(), T = x.frames(), J = x.joints(), E = x.entities();
  RowMatrix<double> frame(J, C);
  for (Index t = 0; t < T; ++t) {
    for (Index e = 0; e < E; ++e) {
      for (Index j = 0; j < J; ++j)
        for (Index c = 0; c < C; ++c) frame(j, c) = x.coords({c, t, j, e});
      const RowMatrix<double> bones = op * frame;
      for (Index j = 0; j < J; ++j)
        for (Index c = 0; c < C; ++c) out.coords({c, t, j, e}) = bones(j, c);
    }
  }
  return out;
}

}  // namespace chase::skel
