#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chase/core/ops.hpp"

namespace chase::shift {

struct SequenceDims {
  Index channels = 3;
  Index frames = 64;
  Index joints = 25;
  Index entities = 2;

  Index points() const { return frames * joints * entities; }
  friend bool operator==(const SequenceDims&, const SequenceDims&) = default;
};

/// Coefficient Learning Block weights: W = W3 relu(W2 pool(W1 X + b)).
/// W1 is C1 x C, b has C1 entries, W2 is C2 x C1 and W3 is U x C2.
struct ClbParams {
  Value w1;
  Value b;
  Value w2;
  Value w3;
  Index c1 = 0;
  Index c2 = 0;
  SegmentSpec seg;
  SequenceDims dims;

  /// W1, W2 Kaiming-uniform (bound 1/sqrt(fan_in)), b and W3 zero: the
  /// initial coefficients are uniform and the shift starts at each segment's
  /// centroid.
  static ClbParams init(const SequenceDims& dims, Index c1, Index c2, const SegmentSpec& seg, std::uint64_t seed);

  /// U >= C1 > C2 >= 1, segment divisibility, tensor shapes.
  void validate() const;

  std::vector<std::pair<std::string, Value>> named() const;
  std::vector<Value> parameters() const;
};

/// Raw and softmax-normalised coefficients of one sample, both U x S.
struct ShiftCoefficients {
  TensorXd w;
  TensorXd alpha;
};

/// Raw coefficients for a batch (N, C, T, J, E) -> (N, U, S).
Value clb_coefficients(const Value& x, const ClbParams& params);

/// Single sequence (C, T, J, E).
ShiftCoefficients clb_forward(const TensorXd& x, const ClbParams& params);

struct ChaseOutput {
  Value x_hat;  // (N, C, T, J, E)
  Value alpha;  // (N, U, S)
  Value p_star; // (N, C, S)
};

/// Shift with given raw coefficients (N, U, S): per segment column a softmax
/// over U, p* = X_flat alpha, each segment's p* broadcast over its block and
/// subtracted.
ChaseOutput apply_shift(const Value& x, const Value& raw_coefficients, const SegmentSpec& seg);

/// Full wrapper forward: coefficients from the CLB, then apply_shift.
ChaseOutput chase_forward(const Value& x, const ClbParams& params);

}  // namespace chase::shift
