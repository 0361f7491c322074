#include "chase/train/gradcheck_suite.hpp"

#include <functional>

#include "chase/core/ops.hpp"
#include "chase/core/random.hpp"
#include "chase/disc/mmd.hpp"
#include "chase/shift/clb.hpp"
#include "chase/shift/pairs.hpp"
#include "chase/train/backbone.hpp"
#include "chase/train/trainer.hpp"

namespace chase::train {

namespace {

struct Check {
  std::string name;
  TensorXd x;
  std::function<Value(const Value&)> op;
  bool scalar = false;
};

class Fixtures {
 public:
  explicit Fixtures(std::uint64_t seed) : rng_(make_rng({seed, stream::init, 77})) {}

  TensorXd uniform(Shape shape, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    TensorXd t(std::move(shape));
    for (Index i = 0; i < t.size(); ++i) t[i] = u(rng_);
    return t;
  }
  // Magnitudes in [0.1, 1] so no entry sits near a ReLU kink.
  TensorXd away_from_zero(Shape shape) {
    TensorXd t = uniform(std::move(shape), 0.1, 1.0);
    std::bernoulli_distribution flip(0.5);
    for (Index i = 0; i < t.size(); ++i)
      if (flip(rng_)) t[i] = -t[i];
    return t;
  }
  Value constant(Shape shape) { return Value(uniform(std::move(shape))); }

 private:
  std::mt19937_64 rng_;
};

// Small CHASE + backbone instance shared by the wrapper and objective checks.
struct Pipeline {
  shift::ClbParams clb;
  Backbone backbone;
  TensorXd x;
  std::vector<int> labels{0, 2};
  std::vector<shift::EntityPair> pairs;
  disc::MpmmdOptions mopts;

  Value loss(const Value& input, const shift::ClbParams& p, const Backbone& bb) const {
    const Value x_hat = shift::chase_forward(input, p).x_hat;
    return total_loss(bb.forward(x_hat), labels, x_hat, pairs, 0.1, mopts).total;
  }
};

Pipeline make_pipeline(Fixtures& fx, std::uint64_t seed) {
  Pipeline p;
  const shift::SequenceDims dims{2, 4, 3, 2};
  p.clb = shift::ClbParams::init(dims, 6, 3, SegmentSpec{}, seed);
  // Non-zero W3 so the coefficient path carries gradient.
  p.clb.w3 = Value(fx.uniform({dims.points(), 3}, -0.5, 0.5), true);
  p.backbone = Backbone::init({{8}, 6, 3}, dims.channels * dims.frames * dims.joints, seed);
  p.x = fx.uniform({2, dims.channels, dims.frames, dims.joints, dims.entities}, -2.0, 2.0);
  p.pairs = shift::all_pairs(dims.entities);
  // Bandwidth frozen at its value for the unperturbed batch.
  const Value x_hat = shift::chase_forward(Value(p.x), p.clb).x_hat;
  p.mopts.bandwidth = disc::median_bandwidth(disc::entity_points(x_hat, 0, p.mopts).tensor(),
                                             disc::entity_points(x_hat, 1, p.mopts).tensor());
  return p;
}

std::vector<Check> build_checks(std::uint64_t seed) {
  Fixtures fx(seed);
  std::vector<Check> c;
  auto unary = [&](std::string name, TensorXd x, std::function<Value(const Value&)> op) {
    c.push_back({std::move(name), std::move(x), std::move(op), false});
  };
  auto scalar = [&](std::string name, TensorXd x, std::function<Value(const Value&)> op) {
    c.push_back({std::move(name), std::move(x), std::move(op), true});
  };

  const Value k34 = fx.constant({3, 4}), k234 = fx.constant({2, 3, 4});
  unary("add", fx.uniform({3, 4}), [=](const Value& x) { return add(x, k34); });
  unary("add[broadcast]", fx.uniform({4}), [=](const Value& x) { return add(k34, x); });
  unary("sub", fx.uniform({3, 4}), [=](const Value& x) { return sub(k34, x); });
  unary("sub[broadcast]", fx.uniform({3, 1}), [=](const Value& x) { return sub(k234, x); });
  unary("mul", fx.uniform({3, 4}), [=](const Value& x) { return mul(x, k34); });
  unary("mul[broadcast]", fx.uniform({2, 1, 4}), [=](const Value& x) { return mul(k234, x); });
  unary("scale", fx.uniform({3, 4}), [](const Value& x) { return scale(x, -1.7); });
  unary("relu", fx.away_from_zero({3, 4}), [](const Value& x) { return relu(x); });
  unary("exp", fx.uniform({3, 4}), [](const Value& x) { return exp(x); });

  const Value k45 = fx.constant({4, 5}), k242 = fx.constant({2, 4, 2});
  unary("matmul", fx.uniform({3, 4}), [=](const Value& x) { return matmul(x, k45); });
  unary("matmul[rhs]", fx.uniform({4, 5}), [=](const Value& x) { return matmul(k34, x); });
  unary("matmul[batched]", fx.uniform({2, 3, 4}), [=](const Value& x) { return matmul(x, k242); });
  unary("transpose", fx.uniform({2, 3, 4}), [](const Value& x) { return transpose(x); });
  unary("reshape", fx.uniform({2, 3, 4}), [](const Value& x) { return reshape(x, {4, 6}); });
  unary("permute", fx.uniform({2, 3, 4}), [](const Value& x) { return permute(x, {2, 0, 1}); });
  scalar("sum", fx.uniform({3, 4}), [](const Value& x) { return sum(mul(x, x)); });
  unary("sum[axis]", fx.uniform({2, 3, 4}), [](const Value& x) { return sum(x, 1); });
  scalar("mean", fx.uniform({3, 4}), [](const Value& x) { return mean(mul(x, x)); });
  unary("mean[axis]", fx.uniform({2, 3, 4}), [](const Value& x) { return mean(x, 2); });
  unary("symmetric_mean", fx.uniform({3, 4, 2}), [](const Value& x) { return symmetric_mean(x, 1); });
  unary("softmax", fx.uniform({3, 4}, -2.0, 2.0), [](const Value& x) { return softmax(x, 1); });
  unary("softmax[axis0]", fx.uniform({3, 4}, -2.0, 2.0), [](const Value& x) { return softmax(x, 0); });
  unary("segment_mean_pool", fx.uniform({2, 2, 4, 2, 2}),
        [](const Value& x) { return segment_mean_pool(x, SegmentSpec{2, 1, 2}); });
  unary("segment_broadcast", fx.uniform({2, 2, 2, 1, 2}), [](const Value& x) { return segment_broadcast(x, 2, 2, 1); });
  scalar("cross_entropy", fx.uniform({4, 3}, -2.0, 2.0), [](const Value& x) {
    static const int labels[] = {0, 2, 1, 2};
    return cross_entropy(x, labels);
  });
  unary("select", fx.uniform({2, 3, 4}), [](const Value& x) { return select(x, 1, 2); });
  unary("index_select", fx.uniform({5, 3}), [](const Value& x) {
    static const Index idx[] = {4, 0, 4, 2};
    return index_select(x, 0, idx);
  });
  const Value k53 = fx.constant({5, 3});
  unary("sqdist", fx.uniform({4, 3}), [=](const Value& x) { return sqdist(x, k53); });
  unary("sqdist[self]", fx.uniform({4, 3}), [](const Value& x) { return sqdist(x, x); });

  const Value k52 = fx.constant({5, 2});
  scalar("mmd_sq", fx.uniform({6, 2}), [=](const Value& x) { return disc::mmd_sq(x, k52, 1.3); });
  scalar("mpmmd_loss", fx.uniform({2, 2, 3, 2, 3}, -2.0, 2.0), [](const Value& x) {
    disc::MpmmdOptions o;
    o.bandwidth = 1.1;
    return disc::mpmmd_loss(x, shift::all_pairs(3), o);
  });

  const Value w1 = Value(fx.uniform({2, 12, 1}, -2.0, 2.0));
  const Value w2 = Value(fx.uniform({2, 12, 2}, -2.0, 2.0));
  const TensorXd xs = fx.uniform({2, 2, 3, 2, 2}, -2.0, 2.0);
  unary("ichas", xs, [=](const Value& x) { return shift::apply_shift(x, w1, SegmentSpec{}).x_hat; });
  unary("ichas[coefficients]", w1.tensor(),
        [=](const Value& w) { return shift::apply_shift(Value(xs), w, SegmentSpec{}).x_hat; });
  unary("ichas[segments]", xs, [=](const Value& x) { return shift::apply_shift(x, w2, SegmentSpec{1, 1, 2}).x_hat; });

  const auto pipe = std::make_shared<Pipeline>(make_pipeline(fx, seed));
  unary("chase_forward[x]", pipe->x, [pipe](const Value& x) { return shift::chase_forward(x, pipe->clb).x_hat; });
  for (const auto& [pname, pv] : pipe->clb.named()) {
    const std::string field = pname;
    unary("chase_forward[" + pname + "]", pv.tensor(), [pipe, field](const Value& v) {
      shift::ClbParams p = pipe->clb;
      if (field == "clb.w1") p.w1 = v;
      else if (field == "clb.b") p.b = v;
      else if (field == "clb.w2") p.w2 = v;
      else p.w3 = v;
      return shift::chase_forward(Value(pipe->x), p).x_hat;
    });
  }
  unary("backbone[x]", pipe->x, [pipe](const Value& x) { return pipe->backbone.forward(x); });

  scalar("total_loss[x]", pipe->x, [pipe](const Value& x) { return pipe->loss(x, pipe->clb, pipe->backbone); });
  for (const auto& [pname, pv] : pipe->clb.named()) {
    const std::string field = pname;
    scalar("total_loss[" + pname + "]", pv.tensor(), [pipe, field](const Value& v) {
      shift::ClbParams p = pipe->clb;
      if (field == "clb.w1") p.w1 = v;
      else if (field == "clb.b") p.b = v;
      else if (field == "clb.w2") p.w2 = v;
      else p.w3 = v;
      return pipe->loss(Value(pipe->x), p, pipe->backbone);
    });
  }
  for (const auto& [pname, pv] : pipe->backbone.named_parameters()) {
    const std::string field = pname;
    scalar("total_loss[" + pname + "]", pv.tensor(), [pipe, field](const Value& v) {
      Backbone bb = pipe->backbone;
      bb.replace_parameter(field, v);
      return pipe->loss(Value(pipe->x), pipe->clb, bb);
    });
  }
  return c;
}

bool matches(const std::string& name, const std::string& fault) {
  return !fault.empty() && (name == fault || name.substr(0, name.find('[')) == fault);
}

}  // namespace

std::vector<std::string> gradcheck_names() {
  std::vector<std::string> out;
  for (const auto& c : build_checks(0)) out.push_back(c.name);
  return out;
}

std::vector<GradcheckEntry> run_gradcheck_suite(const GradcheckOptions& opts) {
  const auto checks = build_checks(opts.seed);
  if (!opts.fault.empty()) {
    bool found = false;
    for (const auto& c : checks) found = found || matches(c.name, opts.fault);
    if (!found) throw UsageError("gradcheck: no check named '" + opts.fault + "'");
  }
  Fixtures projections(opts.seed + 1);
  std::vector<GradcheckEntry> out;
  for (const auto& c : checks) {
    const bool faulty = matches(c.name, opts.fault);
    // Non-scalar outputs are reduced with fixed random weights so every
    // output entry contributes to the checked gradient.
    const Value probe = Value(c.op(Value(c.x)).tensor());
    const Value weights = c.scalar ? Value() : Value(projections.uniform(probe.shape()));
    auto f = [&](const Value& x) {
      Value y = c.op(x);
      if (faulty) y = gradient_fault(y, 1.5);
      return c.scalar ? y : sum(mul(y, weights));
    };
    out.push_back({c.name, grad_check(f, c.x, opts.eps, opts.tol)});
  }
  return out;
}

}  // namespace chase::train
