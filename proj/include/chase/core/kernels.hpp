#pragma once

// Dense kernels shared by the differentiable ops and the closed-form
// routines, so both paths produce bit-identical results.

#include <Eigen/Dense>

#include "chase/core/tensor.hpp"

namespace chase::kernels {

/// Numerically stable softmax of a vector (max subtracted before exp).
template <typename Derived>
ColVector<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar m = x.maxCoeff();
  ColVector<Scalar> e = (x.array() - m).exp().matrix();
  return e / e.sum();
}

/// Row-major dense product.
template <typename Scalar>
RowMatrix<Scalar> product(const Eigen::Ref<const RowMatrix<Scalar>>& a,
                          const Eigen::Ref<const RowMatrix<Scalar>>& b) {
  RowMatrix<Scalar> out = a * b;
  return out;
}

}  // namespace chase::kernels
