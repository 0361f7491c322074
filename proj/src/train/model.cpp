#include <algorithm>
#include <cmath>
#include <numeric>

#include "chase/core/random.hpp"
#include "chase/train/trainer.hpp"

namespace chase::train {

namespace {

template <typename F>
TensorXd map_samples(const TensorXd& batch, F&& f) {
  const Shape sample(batch.shape().begin() + 1, batch.shape().end());
  const Index n = batch.dim(0), per = numel(sample);
  TensorXd out(batch.shape());
  for (Index i = 0; i < n; ++i) {
    skel::SkeletonSequence x = skel::make_sequence(TensorXd(sample, batch.data().segment(i * per, per)), 0);
    out.data().segment(i * per, per) = f(x, i).coords.data();
  }
  return out;
}

}  // namespace

Model Model::init(const TrainConfig& cfg, const Shape& sample_shape) {
  cfg.validate();
  if (sample_shape.size() != 4) throw DimensionError("model: sample shape must be (C, T, J, E)");
  Model m;
  m.normalizer_ = cfg.normalizer;
  m.sample_shape_ = sample_shape;
  m.aug_range_ = cfg.aug_range;
  const Index C = sample_shape[0], T = sample_shape[1], J = sample_shape[2], E = sample_shape[3];
  m.backbone_ = Backbone::init(cfg.backbone, C * T * J, cfg.seed);
  if (cfg.normalizer == Normalizer::chase) {
    m.clb_ = shift::ClbParams::init({C, T, J, E}, cfg.clb.c1, cfg.clb.c2, cfg.clb.seg, cfg.seed);
  }
  m.bn_ = skel::BatchNorm(C);
  return m;
}

ForwardResult Model::forward(const TensorXd& batch, skel::Mode mode, std::uint64_t aug_seed) {
  if (batch.rank() != 5 || !std::equal(sample_shape_.begin(), sample_shape_.end(), batch.shape().begin() + 1)) {
    throw DimensionError("model: batch " + chase::to_string(batch.shape()) + " does not match sample shape " +
                         chase::to_string(sample_shape_));
  }
  const bool training = mode == skel::Mode::train;
  Value x;
  switch (normalizer_) {
    case Normalizer::vanilla:
      x = Value(batch);
      break;
    case Normalizer::s2com:
      x = Value(map_samples(batch, [](const auto& s, Index) { return skel::s2com_per_entity(s); }));
      break;
    case Normalizer::s2com_global:
      x = Value(map_samples(batch, [](const auto& s, Index) { return skel::s2com_global(s); }));
      break;
    case Normalizer::s2com_global_std:
      x = Value(map_samples(batch, [](const auto& s, Index) { return skel::std_scale(s); }));
      break;
    case Normalizer::batchnorm: {
      TensorXd t = batch;
      bn_.normalize(t, mode);
      x = Value(std::move(t));
      break;
    }
    case Normalizer::aug:
      x = training ? Value(map_samples(batch,
                                       [&](const auto& s, Index i) {
                                         return skel::augment_random_shift(
                                             s, aug_range_, derive_seed({aug_seed, static_cast<std::uint64_t>(i)}));
                                       }))
                   : Value(batch);
      break;
    case Normalizer::er:
      x = training ? Value(map_samples(batch,
                                       [&](const auto& s, Index i) {
                                         return skel::augment_entity_permute(
                                             s, derive_seed({aug_seed, static_cast<std::uint64_t>(i)}));
                                       }))
                   : Value(batch);
      break;
    case Normalizer::chase:
      x = shift::chase_forward(Value(batch), *clb_).x_hat;
      break;
  }
  return {x, backbone_.forward(x)};
}

skel::SkeletonSequence Model::normalize_eval(const skel::SkeletonSequence& s) {
  Shape batched = s.coords.shape();
  batched.insert(batched.begin(), 1);
  skel::SkeletonSequence out = s;
  out.coords = forward(s.coords.reshaped(batched), skel::Mode::eval).x_hat.tensor().reshaped(s.coords.shape());
  return out;
}

std::vector<std::pair<std::string, Value>> Model::named_parameters() const {
  std::vector<std::pair<std::string, Value>> out;
  if (clb_) out = clb_->named();
  for (auto& p : backbone_.named_parameters()) out.push_back(std::move(p));
  return out;
}

std::vector<std::pair<std::string, TensorXd>> Model::state() const {
  std::vector<std::pair<std::string, TensorXd>> out;
  for (const auto& [name, v] : named_parameters()) out.emplace_back(name, v.tensor());
  const Index C = bn_.channels();
  TensorXd mean(Shape{C}), var(Shape{C});
  mean.data() = bn_.running_mean().array();
  var.data() = bn_.running_var().array();
  out.emplace_back("bn.running_mean", std::move(mean));
  out.emplace_back("bn.running_var", std::move(var));
  return out;
}

void Model::load_state(const Checkpoint& ckpt) {
  auto fetch = [&](const std::string& name, const Shape& shape) -> const TensorXd& {
    const TensorXd& t = ckpt.tensor(name);
    if (t.shape() != shape) {
      throw FormatError("checkpoint tensor '" + name + "' has shape " + chase::to_string(t.shape()) + ", expected " +
                        chase::to_string(shape), 0);
    }
    return t;
  };
  for (auto& [name, v] : named_parameters()) {
    Value handle = v;
    handle.assign(fetch(name, v.shape()));
  }
  const Shape c{bn_.channels()};
  bn_.set_running(fetch("bn.running_mean", c).data().matrix(), fetch("bn.running_var", c).data().matrix());
}

LossTerms total_loss(const Value& logits, std::span<const int> labels, const Value& x_hat,
                     std::span<const shift::EntityPair> pairs, double lambda, const disc::MpmmdOptions& opts) {
  if (!(lambda >= 0.0)) throw ConfigError("lambda: must be non-negative");
  LossTerms t;
  t.cls = cross_entropy(logits, labels);
  t.total = t.cls;
  if (!pairs.empty()) {
    t.mpmmd = disc::mpmmd_loss(x_hat, pairs, opts);
    if (lambda != 0.0) t.total = add(t.cls, scale(*t.mpmmd, lambda));
  }
  return t;
}

namespace {

Index count_correct(const TensorXd& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || logits.dim(0) != static_cast<Index>(labels.size())) {
    throw DimensionError("accuracy: logits " + chase::to_string(logits.shape()) + " vs " + std::to_string(labels.size()) +
                         " labels");
  }
  const auto m = logits.matrix();
  Index correct = 0;
  for (Index i = 0; i < m.rows(); ++i) {
    Index best = 0;
    m.row(i).maxCoeff(&best);
    if (best == labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return correct;
}

}  // namespace

double top1_accuracy(const TensorXd& logits, std::span<const int> labels) {
  if (labels.empty()) throw UsageError("top1_accuracy: no samples");
  return static_cast<double>(count_correct(logits, labels)) / static_cast<double>(labels.size());
}

double evaluate(Model& model, const skel::Dataset& data, const std::optional<skel::CorruptionConfig>& corruption,
                Index batch_size) {
  if (data.empty()) throw UsageError("evaluate: dataset is empty");
  if (corruption) corruption->validate();
  const auto labels = data.labels();
  const Index n = static_cast<Index>(data.size());
  Index correct = 0;
  for (Index start = 0; start < n; start += batch_size) {
    const Index len = std::min(batch_size, n - start);
    std::vector<skel::SkeletonSequence> batch(data.samples.begin() + start, data.samples.begin() + start + len);
    if (corruption) {
      for (Index i = 0; i < len; ++i) {
        skel::CorruptionConfig c = *corruption;
        c.seed = derive_seed({corruption->seed, static_cast<std::uint64_t>(start + i)});
        batch[static_cast<std::size_t>(i)] = skel::corrupt(batch[static_cast<std::size_t>(i)], c);
      }
    }
    const TensorXd logits = model.forward(skel::stack_coords(batch), skel::Mode::eval).logits.tensor();
    correct += count_correct(
        logits, std::span<const int>(labels).subspan(static_cast<std::size_t>(start), static_cast<std::size_t>(len)));
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace chase::train
