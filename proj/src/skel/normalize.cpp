#include "chase/skel/normalize.hpp"

#include <cmath>

namespace chase::skel {

SkeletonSequence s2com_per_entity(const SkeletonSequence& x) {
  SkeletonSequence out = x;
  const Index C = x.channels(), E = x.entities(), U = x.points();
  auto m = out.coords.matrix(C, U);
  for (Index e = 0; e < E; ++e) {
    // Points of entity e are every E-th column (entity is the fastest axis).
    Eigen::Map<RowMatrix<double>, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>> view(
        m.data() + e, C, U / E, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(U, E));
    const ColVector<double> centre = view.rowwise().mean();
    view.colwise() -= centre;
  }
  return out;
}

SkeletonSequence s2com_global(const SkeletonSequence& x) {
  SkeletonSequence out = x;
  auto m = out.coords.matrix(x.channels(), x.points());
  const ColVector<double> centre = m.rowwise().mean();
  m.colwise() -= centre;
  return out;
}

SkeletonSequence std_scale(const SkeletonSequence& x) {
  SkeletonSequence out = s2com_global(x);
  auto m = out.coords.matrix(x.channels(), x.points());
  for (Index c = 0; c < m.rows(); ++c) {
    const double sd = std::sqrt(m.row(c).squaredNorm() / static_cast<double>(m.cols()));
    if (!(sd > 0.0)) {
      throw DegenerateInputError("std_scale: channel " + std::to_string(c) + " has zero standard deviation");
    }
    m.row(c) /= sd;
  }
  return out;
}

BatchNorm::BatchNorm(Index channels, double momentum, double eps)
    : running_mean_(ColVector<double>::Zero(channels)),
      running_var_(ColVector<double>::Ones(channels)),
      momentum_(momentum),
      eps_(eps) {}

void BatchNorm::set_running(ColVector<double> mean, ColVector<double> var) {
  if (mean.size() != var.size()) throw DimensionError("BatchNorm: running stats of differing length");
  running_mean_ = std::move(mean);
  running_var_ = std::move(var);
}

void BatchNorm::normalize(TensorXd& batch, Mode mode) {
  if (batch.rank() != 5) throw DimensionError("BatchNorm: expected (N, C, T, J, E), got " + to_string(batch.shape()));
  const Index N = batch.dim(0), C = batch.dim(1);
  const Index per = batch.dim(2) * batch.dim(3) * batch.dim(4);
  if (running_mean_.size() == 0) *this = BatchNorm(C, momentum_, eps_);
  if (C != channels()) throw DimensionError("BatchNorm: channel count mismatch");
  // Rows: (n, c) pairs; columns: the per-sample (T, J, E) cells.
  auto m = batch.matrix(N * C, per);
  ColVector<double> mean(C), var(C);
  if (mode == Mode::train) {
    if (N < 2) throw UsageError("BatchNorm: training mode needs a batch of at least 2 samples");
    const double count = static_cast<double>(N * per);
    for (Index c = 0; c < C; ++c) {
      double s = 0.0;
      for (Index n = 0; n < N; ++n) s += m.row(n * C + c).sum();
      mean[c] = s / count;
      double ss = 0.0;
      for (Index n = 0; n < N; ++n) ss += (m.row(n * C + c).array() - mean[c]).square().sum();
      var[c] = ss / count;
      running_mean_[c] = (1.0 - momentum_) * running_mean_[c] + momentum_ * mean[c];
      running_var_[c] = (1.0 - momentum_) * running_var_[c] + momentum_ * var[c] * count / (count - 1.0);
    }
  } else {
    mean = running_mean_;
    var = running_var_;
  }
  for (Index n = 0; n < N; ++n) {
    for (Index c = 0; c < C; ++c) {
      m.row(n * C + c) = (m.row(n * C + c).array() - mean[c]) / std::sqrt(var[c] + eps_);
    }
  }
}

std::vector<SkeletonSequence> BatchNorm::normalize(const std::vector<SkeletonSequence>& batch, Mode mode) {
  if (batch.empty()) throw UsageError("BatchNorm: empty batch");
  TensorXd stacked = stack_coords(batch);
  normalize(stacked, mode);
  std::vector<SkeletonSequence> out = batch;
  const Index per = batch.front().coords.size();
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n].coords.data() = stacked.data().segment(static_cast<Index>(n) * per, per);
  }
  return out;
}

}  // namespace chase::skel
