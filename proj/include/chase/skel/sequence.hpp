#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "chase/core/tensor.hpp"

namespace chase::skel {

/// One multi-entity action clip: coordinates laid out (C, T, J, E), i.e.
/// channel, frame, joint, entity. U = T * J * E points of dimension C.
struct SkeletonSequence {
  TensorXd coords;
  int label = 0;
  Index valid_frames = 0;

  Index channels() const { return coords.dim(0); }
  Index frames() const { return coords.dim(1); }
  Index joints() const { return coords.dim(2); }
  Index entities() const { return coords.dim(3); }
  Index points() const { return frames() * joints() * entities(); }

  friend bool operator==(const SkeletonSequence&, const SkeletonSequence&) = default;
};

/// Full-length sequence (valid_frames = T).
SkeletonSequence make_sequence(TensorXd coords, int label);

/// Every violated invariant, each prefixed with the offending field path.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Checks C in {2, 3}, positive T/J/E, finite coordinates, non-negative label
/// and valid_frames within [1, T].
void validate(const SkeletonSequence& x);

struct Dataset {
  std::vector<SkeletonSequence> samples;
  std::vector<std::string> class_names;
  nlohmann::json generator = nlohmann::json::object();
  std::uint64_t seed = 0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  /// (C, T, J, E) shared by every sample. Throws on an empty or ragged set.
  Shape sample_shape() const;
  std::vector<int> labels() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Stacks the selected samples into an (N, C, T, J, E) tensor.
TensorXd stack_coords(const Dataset& data, std::span<const Index> indices);
TensorXd stack_coords(std::span<const SkeletonSequence> samples);

}  // namespace chase::skel
