#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chase/core/ops.hpp"

namespace chase::train {

struct BackboneConfig {
  std::vector<Index> hidden_widths{64};
  Index feature_dim = 64;
  Index num_classes = 4;

  void validate() const;
};

void to_json(nlohmann::json& j, const BackboneConfig& cfg);
void from_json(const nlohmann::json& j, BackboneConfig& cfg);

/// Weights stored (in, out) so a layer is x W + b.
struct Linear {
  Value weight;
  Value bias;
};

/// Late-fusion stand-in: every entity's (C, T, J) block is flattened and run
/// through one shared ReLU MLP; features are averaged over entities (in an
/// order-independent way) and a linear head produces the logits.
class Backbone {
 public:
  Backbone() = default;
  /// Kaiming-uniform weights and biases, bound 1/sqrt(fan_in).
  static Backbone init(const BackboneConfig& cfg, Index input_dim, std::uint64_t seed);

  /// (N, C, T, J, E) -> (N, K).
  Value forward(const Value& x) const;

  std::vector<std::pair<std::string, Value>> named_parameters() const;
  /// Swaps in a different handle for one named parameter (same shape), so a
  /// gradient check can differentiate with respect to it.
  void replace_parameter(const std::string& name, const Value& v);
  Index input_dim() const { return input_dim_; }
  const BackboneConfig& config() const { return cfg_; }

 private:
  BackboneConfig cfg_;
  Index input_dim_ = 0;
  std::vector<Linear> layers_;
  Linear head_;
};

}  // namespace chase::train
