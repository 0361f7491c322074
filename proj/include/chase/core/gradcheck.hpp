#pragma once

#include <functional>

#include "chase/core/autodiff.hpp"

namespace chase {

using ScalarFn = std::function<Value(const Value&)>;

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  Index worst_index = -1;
  Index checked = 0;
  bool passed = true;
};

/// Compares the reverse-mode gradient of scalar `f` at `x` with central
/// differences (f(x + eps e_i) - f(x - eps e_i)) / (2 eps). The relative error
/// of entry i is |analytic - numeric| / max(|analytic|, |numeric|, rel_floor).
GradCheckReport grad_check(const ScalarFn& f, const TensorXd& x, double eps = 1e-5, double tol = 1e-4,
                           double rel_floor = 1e-3);

/// Dense autodiff Jacobian of `f` at `x`: rows index outputs, columns inputs
/// (both flattened row-major). One backward sweep per output element.
RowMatrix<double> autodiff_jacobian(const std::function<Value(const Value&)>& f, const TensorXd& x);

}  // namespace chase
