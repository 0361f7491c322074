#include "chase/disc/kde.hpp"

#include <cmath>
#include <string>

namespace chase::disc {

void KdeConfig::validate() const {
  if (grid_points_per_dim < 16) {
    throw ConfigError("kde.grid_points_per_dim must be >= 16, got " + std::to_string(grid_points_per_dim));
  }
  if (!(grid_padding >= 0.0)) throw ConfigError("kde.grid_padding must be non-negative");
  if (rule == BandwidthRule::fixed && !(fixed_bandwidth > 0.0)) {
    throw ConfigError("kde.fixed_bandwidth must be positive");
  }
}

Index Grid::cells() const {
  Index n = 1;
  for (Index d = 0; d < dims(); ++d) n *= points_per_dim;
  return n;
}

ColVector<double> kde_bandwidths(const RowMatrix<double>& points, const KdeConfig& cfg) {
  cfg.validate();
  const Index n = points.rows(), d = points.cols();
  if (n < 2) throw UsageError("kde: need at least 2 points, got " + std::to_string(n));
  if (d < 1 || d > 3) throw DimensionError("kde: supports 1 to 3 dimensions, got " + std::to_string(d));
  if (cfg.rule == BandwidthRule::fixed) return ColVector<double>::Constant(d, cfg.fixed_bandwidth);
  const double nn = static_cast<double>(n), dd = static_cast<double>(d);
  const double factor = cfg.rule == BandwidthRule::scott ? std::pow(nn, -1.0 / (dd + 4.0))
                                                         : std::pow(nn * (dd + 2.0) / 4.0, -1.0 / (dd + 4.0));
  ColVector<double> h(d);
  for (Index k = 0; k < d; ++k) {
    const auto col = points.col(k);
    const double mu = col.mean();
    const double sd = std::sqrt((col.array() - mu).square().sum() / (nn - 1.0));
    if (!(sd > 0.0)) {
      throw DegenerateInputError("kde: dimension " + std::to_string(k) +
                                 " has zero spread; use a fixed bandwidth for degenerate data");
    }
    h[k] = sd * factor;
  }
  return h;
}

Grid kde_grid(const RowMatrix<double>& points, const ColVector<double>& bandwidths, const KdeConfig& cfg) {
  Grid g;
  g.points_per_dim = cfg.grid_points_per_dim;
  g.lo = points.colwise().minCoeff().transpose() - cfg.grid_padding * bandwidths;
  g.hi = points.colwise().maxCoeff().transpose() + cfg.grid_padding * bandwidths;
  return g;
}

DiscreteDistribution kde_on_grid(const RowMatrix<double>& points, const ColVector<double>& bandwidths,
                                 const Grid& grid) {
  const Index n = points.rows(), d = points.cols(), G = grid.points_per_dim;
  if (grid.dims() != d || bandwidths.size() != d) throw DimensionError("kde_on_grid: dimension mismatch");
  if (d < 1 || d > 3) throw DimensionError("kde: supports 1 to 3 dimensions, got " + std::to_string(d));
  // Product kernel factorises per axis: K[k](i, g) = exp(-((x_i - node_g) / h)^2 / 2).
  std::vector<RowMatrix<double>> K(static_cast<std::size_t>(d), RowMatrix<double>(n, G));
  for (Index k = 0; k < d; ++k) {
    for (Index i = 0; i < n; ++i)
      for (Index g = 0; g < G; ++g) {
        const double z = (points(i, k) - grid.node(k, g)) / bandwidths[k];
        K[k](i, g) = std::exp(-0.5 * z * z);
      }
  }
  DiscreteDistribution out;
  out.grid = grid;
  out.mass.resize(grid.cells());
  if (d == 1) {
    out.mass = K[0].colwise().sum().transpose();
  } else if (d == 2) {
    RowMatrix<double> m = K[0].transpose() * K[1];
    out.mass = Eigen::Map<const ColVector<double>>(m.data(), m.size());
  } else {
    for (Index g0 = 0; g0 < G; ++g0) {
      RowMatrix<double> m = (K[1].array().colwise() * K[0].col(g0).array()).matrix().transpose() * K[2];
      out.mass.segment(g0 * G * G, G * G) = Eigen::Map<const ColVector<double>>(m.data(), m.size());
    }
  }
  const double total = out.mass.sum();
  if (!(total > 0.0)) throw NumericalError("kde: density vanished on the grid");
  out.mass /= total;
  return out;
}

DiscreteDistribution kde_estimate(const RowMatrix<double>& points, const KdeConfig& cfg) {
  const ColVector<double> h = kde_bandwidths(points, cfg);
  return kde_on_grid(points, h, kde_grid(points, h, cfg));
}

std::pair<DiscreteDistribution, DiscreteDistribution> kde_pair(const RowMatrix<double>& a,
                                                               const RowMatrix<double>& b, const KdeConfig& cfg) {
  if (a.cols() != b.cols()) throw DimensionError("kde_pair: point widths differ");
  const ColVector<double> ha = kde_bandwidths(a, cfg);
  const ColVector<double> hb = kde_bandwidths(b, cfg);
  Grid ga = kde_grid(a, ha, cfg);
  const Grid gb = kde_grid(b, hb, cfg);
  ga.lo = ga.lo.cwiseMin(gb.lo);
  ga.hi = ga.hi.cwiseMax(gb.hi);
  return {kde_on_grid(a, ha, ga), kde_on_grid(b, hb, ga)};
}

}  // namespace chase::disc
