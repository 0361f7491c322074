#include "chase/skel/augment.hpp"

#include <algorithm>
#include <numeric>

#include "chase/core/random.hpp"

namespace chase::skel {

SkeletonSequence augment_random_shift(const SkeletonSequence& x, double range, std::uint64_t seed) {
  if (!(range >= 0.0)) throw ConfigError("augment_random_shift: range must be non-negative");
  SkeletonSequence out = x;
  if (range == 0.0) return out;
  auto rng = make_rng({seed, stream::augment_shift});
  std::uniform_real_distribution<double> u(-range, range);
  ColVector<double> shift(x.channels());
  for (Index c = 0; c < shift.size(); ++c) shift[c] = u(rng);
  out.coords.matrix(x.channels(), x.points()).colwise() += shift;
  return out;
}

SkeletonSequence augment_entity_permute(const SkeletonSequence& x, std::uint64_t seed,
                                        std::vector<Index>* applied) {
  const Index E = x.entities();
  std::vector<Index> perm(static_cast<std::size_t>(E));
  std::iota(perm.begin(), perm.end(), 0);
  auto rng = make_rng({seed, stream::augment_permute});
  std::shuffle(perm.begin(), perm.end(), rng);
  SkeletonSequence out = x;
  const Index rows = x.coords.size() / E;
  auto src = x.coords.matrix(rows, E);
  auto dst = out.coords.matrix(rows, E);
  for (Index e = 0; e < E; ++e) dst.col(e) = src.col(perm[e]);
  if (applied) *applied = std::move(perm);
  return out;
}

void CorruptionConfig::validate() const {
  if (!(noise_sigma >= 0.0)) throw ConfigError("corruption.noise_sigma must be non-negative");
  if (!(mask_prob >= 0.0 && mask_prob <= 1.0)) throw ConfigError("corruption.mask_prob must lie in [0, 1]");
}

SkeletonSequence corrupt(const SkeletonSequence& x, const CorruptionConfig& cfg) {
  cfg.validate();
  SkeletonSequence out = x;
  auto rng = make_rng({cfg.seed, stream::corrupt});
  const Index C = x.channels(), U = x.points();
  auto m = out.coords.matrix(C, U);
  if (cfg.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
    for (Index c = 0; c < C; ++c)
      for (Index u = 0; u < U; ++u) m(c, u) += noise(rng);
  }
  if (cfg.mask_prob > 0.0) {
    std::bernoulli_distribution drop(cfg.mask_prob);
    for (Index u = 0; u < U; ++u) {
      if (drop(rng)) m.col(u).setZero();
    }
  }
  return out;
}

}  // namespace chase::skel
