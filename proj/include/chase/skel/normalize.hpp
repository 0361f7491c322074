#pragma once

#include <vector>

#include "chase/skel/sequence.hpp"

namespace chase::skel {

/// Moves each entity's spatiotemporal centre of mass to the origin
/// independently (S2CoM). Inter-entity offsets are lost.
SkeletonSequence s2com_per_entity(const SkeletonSequence& x);

/// Subtracts the single centre of mass over all (T, J, E) points (S2CoM-dagger).
SkeletonSequence s2com_global(const SkeletonSequence& x);

/// s2com_global followed by division of each channel by its population
/// standard deviation over (T, J, E). Throws DegenerateInputError on a
/// constant channel.
SkeletonSequence std_scale(const SkeletonSequence& x);

enum class Mode { train, eval };

/// Non-affine batch normalisation over the channel axis. Statistics pool every
/// (sample, T, J, E) element of a channel. Running estimates follow
/// r <- (1 - momentum) r + momentum * batch_stat with the unbiased variance.
class BatchNorm {
 public:
  explicit BatchNorm(Index channels = 0, double momentum = 0.1, double eps = 1e-5);

  /// Training mode needs at least two samples and updates the running stats.
  std::vector<SkeletonSequence> normalize(const std::vector<SkeletonSequence>& batch, Mode mode);
  /// In-place on an (N, C, T, J, E) tensor.
  void normalize(TensorXd& batch, Mode mode);

  Index channels() const { return running_mean_.size(); }
  const ColVector<double>& running_mean() const { return running_mean_; }
  const ColVector<double>& running_var() const { return running_var_; }
  void set_running(ColVector<double> mean, ColVector<double> var);
  double momentum() const { return momentum_; }
  double eps() const { return eps_; }

 private:
  ColVector<double> running_mean_;
  ColVector<double> running_var_;
  double momentum_;
  double eps_;
};

}  // namespace chase::skel
