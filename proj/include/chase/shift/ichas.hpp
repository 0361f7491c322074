#pragma once

// Closed-form convex-hull constrained shift for a fixed coefficient vector.
// Points are the columns of a C x U matrix.

#include <Eigen/Dense>

#include "chase/core/kernels.hpp"

namespace chase::shift {

template <typename Scalar>
struct IchasResult {
  RowMatrix<Scalar> x_hat;   // C x U
  RowMatrix<Scalar> p_star;  // C x 1
  RowMatrix<Scalar> alpha;   // U x 1, entries in (0, 1), summing to 1
};

/// Softmax of each column of raw coefficients (U x S).
template <typename Derived>
RowMatrix<typename Derived::Scalar> convex_coefficients(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  RowMatrix<Scalar> alpha(w.rows(), w.cols());
  for (Index s = 0; s < w.cols(); ++s) alpha.col(s) = kernels::softmax(w.col(s));
  return alpha;
}

/// x_hat = X (I - softmax(W) 1^T): every point minus p* = X softmax(W), a
/// strictly positive convex combination of the points.
template <typename DerivedX, typename DerivedW>
IchasResult<typename DerivedX::Scalar> ichas_fixed(const Eigen::MatrixBase<DerivedX>& x,
                                                   const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedX::Scalar;
  if (w.cols() != 1 || w.rows() != x.cols()) {
    throw DimensionError("ichas_fixed: coefficients must be U x 1 with U = " + std::to_string(x.cols()));
  }
  IchasResult<Scalar> r;
  r.alpha = convex_coefficients(w);
  const RowMatrix<Scalar> points = x;
  r.p_star = kernels::product<Scalar>(points, r.alpha);
  r.x_hat = points;
  for (Index u = 0; u < points.cols(); ++u) r.x_hat.col(u) = points.col(u) - r.p_star.col(0);
  return r;
}

/// d x_hat_u / d x_v for any coordinate row: I - 1 softmax(W)^T (U x U).
template <typename DerivedW>
RowMatrix<typename DerivedW::Scalar> jacobian_fixed_w(const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedW::Scalar;
  const Index U = w.rows();
  const ColVector<Scalar> s = kernels::softmax(w.col(0));
  return RowMatrix<Scalar>::Identity(U, U) - ColVector<Scalar>::Ones(U) * s.transpose();
}

}  // namespace chase::shift
