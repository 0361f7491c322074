#pragma once

// Discrete divergences between two distributions on the same support.

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "chase/disc/kde.hpp"

namespace chase::disc {

inline constexpr double kProbabilityFloor = 1e-12;

namespace detail {

template <typename DP, typename DQ>
void check_support(const Eigen::MatrixBase<DP>& p, const Eigen::MatrixBase<DQ>& q) {
  if (p.size() != q.size() || p.size() == 0) {
    throw UsageError("divergence: supports differ (" + std::to_string(p.size()) + " vs " +
                     std::to_string(q.size()) + " cells)");
  }
}

template <typename DP, typename DQ>
typename DP::Scalar kl_floored(const Eigen::MatrixBase<DP>& p, const Eigen::MatrixBase<DQ>& q) {
  using Scalar = typename DP::Scalar;
  const auto pf = p.array().max(Scalar(kProbabilityFloor));
  const auto qf = q.array().max(Scalar(kProbabilityFloor));
  return (pf * (pf / qf).log()).sum();
}

// Terms with p == 0 contribute 0; m > 0 wherever p > 0.
template <typename DP, typename DM>
typename DP::Scalar kl_to_mixture(const Eigen::MatrixBase<DP>& p, const Eigen::MatrixBase<DM>& m) {
  using Scalar = typename DP::Scalar;
  Scalar s = 0;
  for (Index i = 0; i < p.size(); ++i)
    if (p(i) > 0) s += p(i) * std::log(p(i) / m(i));
  return s;
}

inline void check_grids(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (!(p.grid == q.grid)) throw UsageError("divergence: distributions live on different grids");
}

}  // namespace detail

/// (KL(P||Q) + KL(Q||P)) / 2 with cells floored at 1e-12.
template <typename DP, typename DQ>
typename DP::Scalar avg_kld(const Eigen::MatrixBase<DP>& p, const Eigen::MatrixBase<DQ>& q) {
  detail::check_support(p, q);
  return (detail::kl_floored(p, q) + detail::kl_floored(q, p)) / 2;
}

/// Jensen-Shannon divergence, natural log; in [0, ln 2].
template <typename DP, typename DQ>
typename DP::Scalar jsd(const Eigen::MatrixBase<DP>& p, const Eigen::MatrixBase<DQ>& q) {
  using Scalar = typename DP::Scalar;
  detail::check_support(p, q);
  const ColVector<Scalar> m = (p + q) / 2;
  const Scalar v = (detail::kl_to_mixture(p, m) + detail::kl_to_mixture(q, m)) / 2;
  return std::clamp(v, Scalar(0), Scalar(std::log(2.0)));
}

/// Bhattacharyya distance -ln sum sqrt(p q); the coefficient is floored at
/// 1e-12 so disjoint supports give a large finite value.
template <typename DP, typename DQ>
typename DP::Scalar bd(const Eigen::MatrixBase<DP>& p, const Eigen::MatrixBase<DQ>& q) {
  using Scalar = typename DP::Scalar;
  detail::check_support(p, q);
  const Scalar bc = (p.array() * q.array()).sqrt().sum();
  return std::max(Scalar(0), -std::log(std::max(bc, Scalar(kProbabilityFloor))));
}

/// Hellinger distance, in [0, 1].
template <typename DP, typename DQ>
typename DP::Scalar hd(const Eigen::MatrixBase<DP>& p, const Eigen::MatrixBase<DQ>& q) {
  using Scalar = typename DP::Scalar;
  detail::check_support(p, q);
  const Scalar s = (p.array().sqrt() - q.array().sqrt()).square().sum();
  return std::min(Scalar(1), std::sqrt(s) / std::sqrt(Scalar(2)));
}

inline double avg_kld(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  detail::check_grids(p, q);
  return avg_kld(p.mass, q.mass);
}
inline double jsd(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  detail::check_grids(p, q);
  return jsd(p.mass, q.mass);
}
inline double bd(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  detail::check_grids(p, q);
  return bd(p.mass, q.mass);
}
inline double hd(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  detail::check_grids(p, q);
  return hd(p.mass, q.mass);
}

}  // namespace chase::disc
