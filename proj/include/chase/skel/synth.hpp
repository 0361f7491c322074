#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "chase/skel/sequence.hpp"

namespace chase::skel {

/// Desk-scale multi-entity action generator.
///
/// Entity 0 is the anchor, entity 1 sits at the anchor plus a class
/// displacement whose direction falls in sector k of K equal angular sectors
/// (quadrants for K = 4), and entities >= 2 receive label-independent
/// displacements. Every entity is additionally moved by its entity-specific
/// offset mean plus one jitter vector shared by all entities of the sample,
/// so relative geometry carries the label and absolute placement does not.
/// Offset means differ between the train and test splits by one rigid shift.
struct SynthConfig {
  int num_classes = 4;
  Index train_per_class = 500;
  Index test_per_class = 125;
  Index channels = 2;
  Index frames = 8;
  Index joints = 5;
  Index entities = 2;
  /// E rows of C values each.
  std::vector<std::vector<double>> train_offset_means;
  std::vector<std::vector<double>> test_offset_means;
  double offset_spread = 0.3;
  double relative_geometry_scale = 2.0;
  double motion_noise = 0.2;
  double pose_scale = 0.5;
  double motion_amplitude = 0.2;
  std::uint64_t seed = 0;

  /// Defaults for the given dims: train means at the origin, test means
  /// shifted by (3, -2[, 1]) for every entity.
  static SynthConfig defaults(Index channels = 2, Index entities = 2);

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

void to_json(nlohmann::json& j, const SynthConfig& cfg);
/// Missing keys keep their defaults; missing offset means are filled in for
/// the configured dims.
void from_json(const nlohmann::json& j, SynthConfig& cfg);

struct SynthSplits {
  Dataset train;
  Dataset test;
};

/// Deterministic in cfg.seed; each sample draws from its own
/// (seed, split, index) stream. Coordinates are rounded to 32-bit floats so
/// datasets survive the on-disk format exactly.
SynthSplits synth_generate(const SynthConfig& cfg);

}  // namespace chase::skel
