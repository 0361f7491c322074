#include "chase/disc/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "chase/core/random.hpp"

namespace chase::disc {

namespace {

void check_sets(const Value& a, const Value& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2) {
    throw DimensionError("mmd: sample sets must be [n, C], got " + to_string(a.shape()) + " and " +
                         to_string(b.shape()));
  }
  if (a.dim(1) != b.dim(1)) {
    throw DimensionError("mmd: point widths differ (" + std::to_string(a.dim(1)) + " vs " +
                         std::to_string(b.dim(1)) + ")");
  }
}

Value mean_kernel(const Value& a, const Value& b, double gamma) { return mean(exp(scale(sqdist(a, b), -gamma))); }

}  // namespace

double median_bandwidth(const TensorXd& a, const TensorXd& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(1)) {
    throw DimensionError("median_bandwidth: expected [n, C] and [m, C]");
  }
  const Index C = a.dim(1);
  RowMatrix<double> pooled(a.dim(0) + b.dim(0), C);
  pooled.topRows(a.dim(0)) = a.matrix();
  pooled.bottomRows(b.dim(0)) = b.matrix();
  const Index n = pooled.rows();
  if (n < 2) return 1.0;
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) d.push_back((pooled.row(i) - pooled.row(j)).norm());
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double med = *mid;
  if (d.size() % 2 == 0) med = 0.5 * (med + *std::max_element(d.begin(), mid));
  return med > 0.0 ? med : 1.0;
}

Value mmd_sq(const Value& a, const Value& b, double bandwidth) {
  check_sets(a, b);
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw UsageError("mmd_sq: bandwidth must be positive and finite, got " + std::to_string(bandwidth));
  }
  const auto& ta = a.tensor().data();
  const auto& tb = b.tensor().data();
  if (std::lexicographical_compare(tb.begin(), tb.end(), ta.begin(), ta.end())) return mmd_sq(b, a, bandwidth);
  const double gamma = 1.0 / (2.0 * bandwidth * bandwidth);
  return sub(add(mean_kernel(a, a, gamma), mean_kernel(b, b, gamma)), scale(mean_kernel(a, b, gamma), 2.0));
}

Value mmd_sq(const Value& a, const Value& b) {
  check_sets(a, b);
  return mmd_sq(a, b, median_bandwidth(a.tensor(), b.tensor()));
}

Value entity_points(const Value& x_hat, Index entity, const MpmmdOptions& opts) {
  const Shape& s = x_hat.shape();
  if (s.size() != 5) throw DimensionError("entity_points: expected (N, C, T, J, E), got " + to_string(s));
  if (entity < 0 || entity >= s[4]) throw IndexError("entity_points: entity " + std::to_string(entity) + " out of range");
  const Index N = s[0], C = s[1], T = s[2], J = s[3];
  const Index total = N * T * J;
  Value pts = reshape(permute(select(x_hat, 4, entity), {0, 2, 3, 1}), {total, C});
  if (opts.points_per_entity < 1) throw ConfigError("points_per_entity must be >= 1");
  if (total <= opts.points_per_entity) return pts;
  std::vector<Index> all(static_cast<std::size_t>(total));
  std::iota(all.begin(), all.end(), Index{0});
  std::vector<Index> keep;
  keep.reserve(static_cast<std::size_t>(opts.points_per_entity));
  auto rng = make_rng({opts.subsample_seed, stream::subsample});
  std::sample(all.begin(), all.end(), std::back_inserter(keep), opts.points_per_entity, rng);
  return index_select(pts, 0, keep);
}

Value mpmmd_loss(const Value& x_hat, std::span<const shift::EntityPair> pairs, const MpmmdOptions& opts) {
  if (x_hat.shape().size() != 5) throw DimensionError("mpmmd_loss: expected (N, C, T, J, E), got " + to_string(x_hat.shape()));
  const Index E = x_hat.dim(4);
  if (E < 2) throw UsageError("mpmmd_loss: needs E >= 2 entities, got " + std::to_string(E));
  if (pairs.empty()) throw UsageError("mpmmd_loss: no entity pairs");
  std::map<Index, Value> cache;
  auto points = [&](Index e) -> const Value& {
    auto it = cache.find(e);
    if (it == cache.end()) it = cache.emplace(e, entity_points(x_hat, e, opts)).first;
    return it->second;
  };
  Value total;
  bool first = true;
  for (const auto& p : pairs) {
    if (p.i < 0 || p.j <= p.i || p.j >= E) {
      throw UsageError("mpmmd_loss: invalid pair (" + std::to_string(p.i) + ", " + std::to_string(p.j) + ")");
    }
    const Value& a = points(p.i);
    const Value& b = points(p.j);
    Value m = opts.bandwidth ? mmd_sq(a, b, *opts.bandwidth) : mmd_sq(a, b);
    total = first ? m : add(total, m);
    first = false;
  }
  return scale(total, 1.0 / static_cast<double>(pairs.size()));
}

}  // namespace chase::disc
