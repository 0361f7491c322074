#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chase/core/gradcheck.hpp"

namespace chase::train {

struct GradcheckOptions {
  double eps = 1e-5;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  /// Name of a check (or the prefix before '[') whose backward is deliberately
  /// scaled by 1.5; empty for none. Used to prove the gate can fail.
  std::string fault;
};

struct GradcheckEntry {
  std::string name;
  GradCheckReport report;
};

/// Names of every check, in run order.
std::vector<std::string> gradcheck_names();

/// Central-difference checks of every differentiable op, the CHASE wrapper
/// (inputs and CLB weights), the backbone and the full objective
/// cross_entropy + 0.1 * MPMMD on a 2-sample batch. Throws UsageError when
/// `fault` names no check.
std::vector<GradcheckEntry> run_gradcheck_suite(const GradcheckOptions& opts = {});

}  // namespace chase::train
