#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chase/core/ops.hpp"
#include "chase/shift/clb.hpp"

namespace chase::shift {

/// Trainable CLB parameters, layer by layer: C1*C + C1 + C2*C1 + U*C2.
/// The backbone is not included.
std::int64_t param_count(const SequenceDims& dims, Index c1, Index c2, const SegmentSpec& seg);

/// Forward FLOPs of one CHASE wrapper pass for a single sample. Convention
/// "MAC2": a multiply-accumulate counts 2, every add/compare/divide/exp 1.
struct FlopReport {
  std::int64_t total = 0;
  std::string convention = "MAC2";
  std::vector<std::pair<std::string, std::int64_t>> terms;
};

FlopReport flop_count(const SequenceDims& dims, Index c1, Index c2, const SegmentSpec& seg);

}  // namespace chase::shift
