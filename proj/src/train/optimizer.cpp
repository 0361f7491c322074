#include "chase/train/optimizer.hpp"

#include <string>

namespace chase::train {

void SgdConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("lr: must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum: must lie in [0, 1)");
  if (!(decay_rate > 0.0)) throw ConfigError("decay_rate: must be positive");
  for (std::size_t i = 0; i < decay_epochs.size(); ++i) {
    if (decay_epochs[i] < 0) throw ConfigError("lr_decay_epochs[" + std::to_string(i) + "]: must be non-negative");
  }
}

double scheduled_lr(const SgdConfig& cfg, Index epoch) {
  double lr = cfg.lr;
  for (Index m : cfg.decay_epochs)
    if (m <= epoch) lr *= cfg.decay_rate;
  return lr;
}

NesterovSgd::NesterovSgd(std::vector<Value> params, double momentum)
    : params_(std::move(params)), momentum_(momentum) {
  for (const auto& p : params_) velocity_.emplace_back(p.shape());
}

void NesterovSgd::step(double lr) {
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Value& p = params_[k];
    if (!p.has_grad()) throw UsageError("optimizer: parameter " + std::to_string(k) + " has no gradient");
    const auto& g = p.grad().data();
    auto& v = velocity_[k].data();
    v = momentum_ * v + g;
    TensorXd next = p.tensor();
    next.data() -= lr * (g + momentum_ * v);
    p.assign(std::move(next));
  }
}

void NesterovSgd::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

}  // namespace chase::train
