#pragma once

#include <utility>

#include "chase/core/tensor.hpp"

namespace chase::disc {

enum class BandwidthRule { scott, silverman, fixed };

struct KdeConfig {
  BandwidthRule rule = BandwidthRule::scott;
  double fixed_bandwidth = 1.0;
  Index grid_points_per_dim = 64;
  /// Grid extends this many bandwidths past the data on each side.
  double grid_padding = 3.0;

  void validate() const;
};

/// Regular grid: points_per_dim nodes per axis from lo[d] to hi[d] inclusive.
/// Cells are flattened row-major over the axes.
struct Grid {
  ColVector<double> lo;
  ColVector<double> hi;
  Index points_per_dim = 0;

  Index dims() const { return lo.size(); }
  Index cells() const;
  double step(Index d) const { return (hi[d] - lo[d]) / static_cast<double>(points_per_dim - 1); }
  double node(Index d, Index i) const { return lo[d] + step(d) * static_cast<double>(i); }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.points_per_dim == b.points_per_dim && a.lo.size() == b.lo.size() && a.lo == b.lo && a.hi == b.hi;
  }
};

struct DiscreteDistribution {
  Grid grid;
  ColVector<double> mass;  // sums to 1
};

/// Per-dimension bandwidths for points [n, d]. Scott: std * n^(-1/(d+4));
/// Silverman: std * (n (d+2) / 4)^(-1/(d+4)). Throws DegenerateInputError
/// when a dimension has zero spread under a data-driven rule.
ColVector<double> kde_bandwidths(const RowMatrix<double>& points, const KdeConfig& cfg);

/// Bounding box of the points padded by grid_padding * bandwidth.
Grid kde_grid(const RowMatrix<double>& points, const ColVector<double>& bandwidths, const KdeConfig& cfg);

/// Gaussian product-kernel density at every grid node, normalised to unit mass.
/// Supports 1 to 3 dimensions.
DiscreteDistribution kde_on_grid(const RowMatrix<double>& points, const ColVector<double>& bandwidths,
                                 const Grid& grid);

/// Density on a grid anchored to the data.
DiscreteDistribution kde_estimate(const RowMatrix<double>& points, const KdeConfig& cfg);

/// Both densities on one grid spanning the union of their padded boxes.
std::pair<DiscreteDistribution, DiscreteDistribution> kde_pair(const RowMatrix<double>& a,
                                                               const RowMatrix<double>& b, const KdeConfig& cfg);

}  // namespace chase::disc
