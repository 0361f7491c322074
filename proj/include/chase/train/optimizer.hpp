#pragma once

#include <vector>

#include <json.hpp>

#include "chase/core/autodiff.hpp"

namespace chase::train {

struct SgdConfig {
  double lr = 0.1;
  double momentum = 0.9;
  std::vector<Index> decay_epochs{20, 25};
  double decay_rate = 0.1;

  void validate() const;
};

/// Learning rate for a 0-based epoch: lr * decay_rate^(number of decay epochs <= epoch).
double scheduled_lr(const SgdConfig& cfg, Index epoch);

/// Nesterov momentum: v <- mu v + g; p <- p - lr (g + mu v).
/// With mu = 0 this is plain gradient descent.
class NesterovSgd {
 public:
  NesterovSgd() = default;
  NesterovSgd(std::vector<Value> params, double momentum);

  /// Throws UsageError if any parameter has no gradient.
  void step(double lr);
  void zero_grad();

  const std::vector<Value>& params() const { return params_; }
  std::vector<TensorXd>& velocity() { return velocity_; }
  const std::vector<TensorXd>& velocity() const { return velocity_; }

 private:
  std::vector<Value> params_;
  std::vector<TensorXd> velocity_;
  double momentum_ = 0.0;
};

}  // namespace chase::train
