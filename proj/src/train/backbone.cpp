#include "chase/train/backbone.hpp"

#include <cmath>

#include "chase/core/random.hpp"

namespace chase::train {

void BackboneConfig::validate() const {
  for (std::size_t i = 0; i < hidden_widths.size(); ++i) {
    if (hidden_widths[i] < 1) throw ConfigError("backbone.hidden_widths[" + std::to_string(i) + "]: must be positive");
  }
  if (feature_dim < 1) throw ConfigError("backbone.feature_dim: must be positive");
  if (num_classes < 2) throw ConfigError("backbone.num_classes: need at least 2 classes");
}

void to_json(nlohmann::json& j, const BackboneConfig& cfg) {
  j = {{"hidden_widths", cfg.hidden_widths}, {"feature_dim", cfg.feature_dim}, {"num_classes", cfg.num_classes}};
}

void from_json(const nlohmann::json& j, BackboneConfig& cfg) {
  for (const auto& [key, value] : j.items()) {
    if (key == "hidden_widths") cfg.hidden_widths = value.get<std::vector<Index>>();
    else if (key == "feature_dim") cfg.feature_dim = value.get<Index>();
    else if (key == "num_classes") cfg.num_classes = value.get<Index>();
    else throw ConfigError("backbone." + key + ": unknown key");
  }
}

namespace {

Linear make_linear(Index in, Index out, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::uniform_real_distribution<double> u(-bound, bound);
  TensorXd w(Shape{in, out}), b(Shape{out});
  for (Index i = 0; i < w.size(); ++i) w[i] = u(rng);
  for (Index i = 0; i < b.size(); ++i) b[i] = u(rng);
  return {Value(std::move(w), true), Value(std::move(b), true)};
}

}  // namespace

Backbone Backbone::init(const BackboneConfig& cfg, Index input_dim, std::uint64_t seed) {
  cfg.validate();
  if (input_dim < 1) throw ConfigError("backbone: input dimension must be positive");
  auto rng = make_rng({seed, stream::init, 1});
  Backbone bb;
  bb.cfg_ = cfg;
  bb.input_dim_ = input_dim;
  Index in = input_dim;
  for (Index w : cfg.hidden_widths) {
    bb.layers_.push_back(make_linear(in, w, rng));
    in = w;
  }
  bb.layers_.push_back(make_linear(in, cfg.feature_dim, rng));
  bb.head_ = make_linear(cfg.feature_dim, cfg.num_classes, rng);
  return bb;
}

Value Backbone::forward(const Value& x) const {
  const Shape& s = x.shape();
  if (s.size() != 5 || s[1] * s[2] * s[3] != input_dim_) {
    throw DimensionError("backbone: input " + to_string(s) + " incompatible with per-entity size " +
                         std::to_string(input_dim_));
  }
  const Index N = s[0], E = s[4];
  Value h = reshape(permute(x, {0, 4, 1, 2, 3}), {N * E, input_dim_});
  for (const auto& layer : layers_) h = relu(add(matmul(h, layer.weight), layer.bias));
  const Value features = symmetric_mean(reshape(h, {N, E, cfg_.feature_dim}), 1);
  return add(matmul(features, head_.weight), head_.bias);
}

std::vector<std::pair<std::string, Value>> Backbone::named_parameters() const {
  std::vector<std::pair<std::string, Value>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string p = "backbone.layer" + std::to_string(i);
    out.emplace_back(p + ".weight", layers_[i].weight);
    out.emplace_back(p + ".bias", layers_[i].bias);
  }
  out.emplace_back("backbone.head.weight", head_.weight);
  out.emplace_back("backbone.head.bias", head_.bias);
  return out;
}

void Backbone::replace_parameter(const std::string& name, const Value& v) {
  auto swap_in = [&](Value& slot) {
    if (slot.shape() != v.shape()) throw DimensionError("replace_parameter: shape mismatch for " + name);
    slot = v;
  };
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string p = "backbone.layer" + std::to_string(i);
    if (name == p + ".weight") return swap_in(layers_[i].weight);
    if (name == p + ".bias") return swap_in(layers_[i].bias);
  }
  if (name == "backbone.head.weight") return swap_in(head_.weight);
  if (name == "backbone.head.bias") return swap_in(head_.bias);
  throw UsageError("replace_parameter: no parameter named " + name);
}

}  // namespace chase::train
