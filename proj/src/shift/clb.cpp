#include "chase/shift/clb.hpp"

#include <cmath>

#include "chase/core/random.hpp"

namespace chase::shift {

namespace {

TensorXd kaiming_uniform(Index rows, Index cols, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  std::uniform_real_distribution<double> u(-bound, bound);
  TensorXd t(Shape{rows, cols});
  for (Index i = 0; i < t.size(); ++i) t[i] = u(rng);
  return t;
}

void check_divides(const SequenceDims& d, const SegmentSpec& seg) {
  if (seg.t < 1 || seg.j < 1 || seg.e < 1 || d.frames % seg.t || d.joints % seg.j || d.entities % seg.e) {
    throw ConfigError("segment spec (" + std::to_string(seg.t) + ", " + std::to_string(seg.j) + ", " +
                      std::to_string(seg.e) + ") must divide (T, J, E) = (" + std::to_string(d.frames) + ", " +
                      std::to_string(d.joints) + ", " + std::to_string(d.entities) + ")");
  }
}

}  // namespace

ClbParams ClbParams::init(const SequenceDims& dims, Index c1, Index c2, const SegmentSpec& seg,
                          std::uint64_t seed) {
  auto rng = make_rng({seed, stream::init, 0});
  ClbParams p;
  p.c1 = c1;
  p.c2 = c2;
  p.seg = seg;
  p.dims = dims;
  p.w1 = Value(kaiming_uniform(c1, dims.channels, rng), true);
  p.b = Value(TensorXd::zeros(Shape{c1}), true);
  p.w2 = Value(kaiming_uniform(c2, c1, rng), true);
  p.w3 = Value(TensorXd::zeros(Shape{dims.points(), c2}), true);
  p.validate();
  return p;
}

void ClbParams::validate() const {
  const Index U = dims.points();
  if (dims.channels < 1 || dims.frames < 1 || dims.joints < 1 || dims.entities < 1) {
    throw ConfigError("clb: sequence dims must be positive");
  }
  if (!(U >= c1 && c1 > c2 && c2 >= 1)) {
    throw ConfigError("clb: need U >= C1 > C2 >= 1, got U=" + std::to_string(U) + ", C1=" + std::to_string(c1) +
                      ", C2=" + std::to_string(c2));
  }
  check_divides(dims, seg);
  auto expect = [](const Value& v, const Shape& s, const char* name) {
    if (v.shape() != s) {
      throw DimensionError(std::string("clb.") + name + ": expected shape " + to_string(s) + ", got " +
                           to_string(v.shape()));
    }
  };
  expect(w1, {c1, dims.channels}, "w1");
  expect(b, {c1}, "b");
  expect(w2, {c2, c1}, "w2");
  expect(w3, {U, c2}, "w3");
}

std::vector<std::pair<std::string, Value>> ClbParams::named() const {
  return {{"clb.w1", w1}, {"clb.b", b}, {"clb.w2", w2}, {"clb.w3", w3}};
}

std::vector<Value> ClbParams::parameters() const { return {w1, b, w2, w3}; }

Value clb_coefficients(const Value& x, const ClbParams& params) {
  const Shape& s = x.shape();
  const SequenceDims& d = params.dims;
  if (s.size() != 5 || s[1] != d.channels || s[2] != d.frames || s[3] != d.joints || s[4] != d.entities) {
    throw DimensionError("clb: input " + to_string(s) + " does not match (N, " + std::to_string(d.channels) + ", " +
                         std::to_string(d.frames) + ", " + std::to_string(d.joints) + ", " +
                         std::to_string(d.entities) + ")");
  }
  const Index N = s[0], U = d.points(), S = params.seg.count();
  // Pointwise channel affine (kernel-size-1 convolution).
  Value h = reshape(permute(x, {0, 2, 3, 4, 1}), {N * U, d.channels});
  h = add(matmul(h, transpose(params.w1)), params.b);
  h = permute(reshape(h, {N, d.frames, d.joints, d.entities, params.c1}), {0, 4, 1, 2, 3});
  // Squeeze to one descriptor per segment.
  h = segment_mean_pool(h, params.seg);
  h = reshape(permute(reshape(h, {N, params.c1, S}), {0, 2, 1}), {N * S, params.c1});
  h = relu(matmul(h, transpose(params.w2)));
  h = matmul(h, transpose(params.w3));
  return permute(reshape(h, {N, S, U}), {0, 2, 1});
}

ShiftCoefficients clb_forward(const TensorXd& x, const ClbParams& params) {
  if (x.rank() != 4) throw DimensionError("clb_forward: expected (C, T, J, E), got " + to_string(x.shape()));
  Shape batched = x.shape();
  batched.insert(batched.begin(), 1);
  const Value w = clb_coefficients(Value(x.reshaped(batched)), params);
  const Index U = w.dim(1), S = w.dim(2);
  return {w.tensor().reshaped({U, S}), softmax(w, 1).tensor().reshaped({U, S})};
}

ChaseOutput apply_shift(const Value& x, const Value& raw_coefficients, const SegmentSpec& seg) {
  const Shape& s = x.shape();
  if (s.size() != 5) throw DimensionError("apply_shift: expected (N, C, T, J, E), got " + to_string(s));
  const Index N = s[0], C = s[1], T = s[2], J = s[3], E = s[4], U = T * J * E;
  check_divides({C, T, J, E}, seg);
  if (raw_coefficients.shape() != Shape{N, U, seg.count()}) {
    throw DimensionError("apply_shift: coefficients " + to_string(raw_coefficients.shape()) + ", expected " +
                         to_string({N, U, seg.count()}));
  }
  ChaseOutput out;
  out.alpha = softmax(raw_coefficients, 1);
  out.p_star = matmul(reshape(x, {N, C, U}), out.alpha);
  const Value per_segment = reshape(out.p_star, {N, C, seg.t, seg.j, seg.e});
  out.x_hat = sub(x, segment_broadcast(per_segment, T / seg.t, J / seg.j, E / seg.e));
  return out;
}

ChaseOutput chase_forward(const Value& x, const ClbParams& params) {
  return apply_shift(x, clb_coefficients(x, params), params.seg);
}

}  // namespace chase::shift
