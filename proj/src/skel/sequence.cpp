#include "chase/skel/sequence.hpp"

#include <cmath>

namespace chase::skel {

namespace {

std::string join(const std::vector<std::string>& issues) {
  std::string s = "invalid skeleton sequence";
  for (const auto& i : issues) s += "; " + i;
  return s;
}

}  // namespace

SkeletonSequence make_sequence(TensorXd coords, int label) {
  SkeletonSequence s{std::move(coords), label, 0};
  if (s.coords.rank() == 4) s.valid_frames = s.frames();
  return s;
}

ValidationError::ValidationError(std::vector<std::string> issues)
    : std::invalid_argument(join(issues)), issues_(std::move(issues)) {}

void validate(const SkeletonSequence& x) {
  std::vector<std::string> issues;
  const Shape& shape = x.coords.shape();
  if (shape.size() != 4) {
    issues.push_back("coords.shape: expected rank 4 (C, T, J, E), got " + to_string(shape));
  } else {
    if (shape[0] != 2 && shape[0] != 3) {
      issues.push_back("coords.shape[0]: channel count " + std::to_string(shape[0]) + " outside {2, 3}");
    }
    if (x.valid_frames < 1 || x.valid_frames > shape[1]) {
      issues.push_back("valid_frames: " + std::to_string(x.valid_frames) + " outside [1, " +
                       std::to_string(shape[1]) + "]");
    }
  }
  for (Index i = 0; i < x.coords.size(); ++i) {
    if (!std::isfinite(x.coords[i])) {
      issues.push_back("coords[" + std::to_string(i) + "]: non-finite value");
      break;
    }
  }
  if (x.label < 0) issues.push_back("label: negative class id " + std::to_string(x.label));
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

Shape Dataset::sample_shape() const {
  if (samples.empty()) throw UsageError("dataset is empty");
  const Shape& s = samples.front().coords.shape();
  for (const auto& x : samples) {
    if (x.coords.shape() != s) throw DimensionError("dataset samples have differing shapes");
  }
  return s;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> y;
  y.reserve(samples.size());
  for (const auto& x : samples) y.push_back(x.label);
  return y;
}

TensorXd stack_coords(std::span<const SkeletonSequence> samples) {
  if (samples.empty()) throw UsageError("stack_coords: no samples");
  Shape shape = samples.front().coords.shape();
  const Index per = numel(shape);
  shape.insert(shape.begin(), static_cast<Index>(samples.size()));
  TensorXd out(shape);
  for (std::size_t n = 0; n < samples.size(); ++n) {
    if (samples[n].coords.size() != per) throw DimensionError("stack_coords: ragged samples");
    out.data().segment(static_cast<Index>(n) * per, per) = samples[n].coords.data();
  }
  return out;
}

TensorXd stack_coords(const Dataset& data, std::span<const Index> indices) {
  if (indices.empty()) throw UsageError("stack_coords: no samples");
  Shape shape = data.sample_shape();
  const Index per = numel(shape);
  shape.insert(shape.begin(), static_cast<Index>(indices.size()));
  TensorXd out(shape);
  for (std::size_t n = 0; n < indices.size(); ++n) {
    out.data().segment(static_cast<Index>(n) * per, per) =
        data.samples.at(static_cast<std::size_t>(indices[n])).coords.data();
  }
  return out;
}

}  // namespace chase::skel
