#include "chase/shift/accounting.hpp"

#include <string>

namespace chase::shift {

namespace {

void check(const SequenceDims& d, Index c1, Index c2, const SegmentSpec& seg) {
  if (d.channels < 1 || d.frames < 1 || d.joints < 1 || d.entities < 1 || c1 < 1 || c2 < 1) {
    throw ConfigError("accounting: dims and widths must be positive");
  }
  if (seg.t < 1 || seg.j < 1 || seg.e < 1 || d.frames % seg.t || d.joints % seg.j || d.entities % seg.e) {
    throw ConfigError("accounting: segment spec must divide (T, J, E)");
  }
}

}  // namespace

std::int64_t param_count(const SequenceDims& dims, Index c1, Index c2, const SegmentSpec& seg) {
  check(dims, c1, c2, seg);
  const std::int64_t C = dims.channels, U = dims.points();
  const std::int64_t w1 = c1 * C, b = c1, w2 = c2 * c1, w3 = U * c2;
  return w1 + b + w2 + w3;
}

FlopReport flop_count(const SequenceDims& dims, Index c1, Index c2, const SegmentSpec& seg) {
  check(dims, c1, c2, seg);
  const std::int64_t C = dims.channels, U = dims.points(), S = seg.count();
  FlopReport r;
  auto term = [&](std::string name, std::int64_t v) {
    r.terms.emplace_back(std::move(name), v);
    r.total += v;
  };
  term("affine", 2 * U * C * c1 + U * c1);     // W1 X + b
  term("pool", U * c1);                         // block sums and one divide per output is folded in
  term("w2", 2 * S * c1 * c2);
  term("relu", S * c2);
  term("w3", 2 * S * c2 * U);
  term("softmax", 3 * U * S);                   // subtract max, exp, divide
  term("combine", 2 * C * U * S);               // X_flat alpha
  term("subtract", C * U);
  return r;
}

}  // namespace chase::shift
