#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "chase/core/ops.hpp"
#include "chase/train/backbone.hpp"
#include "chase/train/optimizer.hpp"

namespace chase::train {

/// Input normalisation pipelines. er = entity reordering augmentation.
enum class Normalizer { vanilla, s2com, s2com_global, s2com_global_std, batchnorm, aug, er, chase };

std::string to_string(Normalizer n);
/// Throws ConfigError listing the accepted names.
Normalizer parse_normalizer(const std::string& name);

struct ClbConfig {
  Index c1 = 16;
  Index c2 = 4;
  SegmentSpec seg;
};

struct TrainConfig {
  SgdConfig sgd;
  Index epochs = 30;
  Index batch_size = 32;
  double lambda = 0.1;
  /// Entity pairs per mini-batch for the MPMMD term.
  Index pairs_per_batch = 1;
  std::uint64_t seed = 0;
  Normalizer normalizer = Normalizer::chase;
  BackboneConfig backbone;
  ClbConfig clb;
  Index points_per_entity = 256;
  /// Half-width of the random shift used by the aug normaliser.
  double aug_range = 3.0;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

// Keys: lr, momentum, lr_decay_epochs, decay_rate, epochs, batch_size, lambda,
// M, seed, normalizer, backbone{...}, clb{c1, c2, seg[3]}, points_per_entity,
// aug_range. Unknown keys and invalid values are rejected.
void to_json(nlohmann::json& j, const TrainConfig& cfg);
void from_json(const nlohmann::json& j, TrainConfig& cfg);

}  // namespace chase::train
