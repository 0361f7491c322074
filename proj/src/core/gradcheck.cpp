#include "chase/core/gradcheck.hpp"

#include <cmath>

#include "chase/core/ops.hpp"

namespace chase {

GradCheckReport grad_check(const ScalarFn& f, const TensorXd& x, double eps, double tol, double rel_floor) {
  if (!(eps > 0.0)) throw UsageError("grad_check: eps must be positive");
  Value input(x, true);
  Value y = f(input);
  backward(y);
  const TensorXd analytic = input.has_grad() ? input.grad() : TensorXd::zeros(x.shape());

  GradCheckReport report;
  TensorXd probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + eps;
    const double fp = f(Value(probe)).item();
    probe[i] = orig - eps;
    const double fm = f(Value(probe)).item();
    probe[i] = orig;
    const double numeric = (fp - fm) / (2.0 * eps);
    const double abs_err = std::abs(analytic[i] - numeric);
    const double rel_err = abs_err / std::max({std::abs(analytic[i]), std::abs(numeric), rel_floor});
    report.max_abs_error = std::max(report.max_abs_error, abs_err);
    if (rel_err > report.max_rel_error || report.worst_index < 0) {
      report.max_rel_error = std::max(report.max_rel_error, rel_err);
      report.worst_index = i;
    }
    ++report.checked;
  }
  report.passed = report.max_rel_error < tol;
  return report;
}

RowMatrix<double> autodiff_jacobian(const std::function<Value(const Value&)>& f, const TensorXd& x) {
  Value input(x, true);
  Value y = f(input);
  RowMatrix<double> jac = RowMatrix<double>::Zero(y.size(), x.size());
  for (Index r = 0; r < y.size(); ++r) {
    TensorXd pick = TensorXd::zeros(y.shape());
    pick[r] = 1.0;
    input.zero_grad();
    backward(sum(mul(y, Value(pick))));
    if (input.has_grad()) jac.row(r) = input.grad().data().matrix().transpose();
  }
  return jac;
}

}  // namespace chase
