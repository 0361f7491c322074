#include "chase/train/trainer.hpp"

#include <algorithm>
#include <numeric>

#include "chase/core/random.hpp"
#include "chase/shift/pairs.hpp"

namespace chase::train {

nlohmann::json to_json(const EpochLog& log) {
  nlohmann::json j;
  j["epoch"] = log.epoch;
  j["lr"] = log.lr;
  j["train_loss"] = log.train_loss;
  j["cls_loss"] = log.cls_loss;
  if (log.mpmmd) j["mpmmd"] = *log.mpmmd;
  if (log.eval_acc) j["eval_acc"] = *log.eval_acc;
  return j;
}

Trainer::Trainer(TrainConfig cfg, const skel::Dataset& train, const skel::Dataset* eval)
    : cfg_(std::move(cfg)), train_(train), eval_(eval) {
  cfg_.validate();
  if (train_.size() < 2) throw ConfigError("training set needs at least 2 samples");
  const Shape shape = train_.sample_shape();
  for (int label : train_.labels()) {
    if (label >= cfg_.backbone.num_classes) {
      throw ConfigError("backbone.num_classes: " + std::to_string(cfg_.backbone.num_classes) +
                        " is too small for label " + std::to_string(label));
    }
  }
  if (eval_ && !eval_->empty() && eval_->sample_shape() != shape) {
    throw ConfigError("evaluation set sample shape " + chase::to_string(eval_->sample_shape()) + " differs from training " +
                      chase::to_string(shape));
  }
  if (cfg_.normalizer == Normalizer::chase && shape[3] < 2 && cfg_.lambda > 0.0) {
    throw ConfigError("lambda: MPMMD needs at least 2 entities");
  }
  model_ = Model::init(cfg_, shape);
  std::vector<Value> params;
  for (auto& [name, v] : model_.named_parameters()) {
    param_names_.push_back(name);
    params.push_back(v);
  }
  opt_ = NesterovSgd(std::move(params), cfg_.sgd.momentum);
}

EpochLog Trainer::run_epoch() {
  if (done()) throw UsageError("trainer: all " + std::to_string(cfg_.epochs) + " epochs already ran");
  EpochLog log;
  log.epoch = epoch_;
  log.lr = scheduled_lr(cfg_.sgd, epoch_);

  const Index n = static_cast<Index>(train_.size());
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  auto rng = make_rng({cfg_.seed, stream::shuffle, static_cast<std::uint64_t>(epoch_)});
  std::shuffle(order.begin(), order.end(), rng);

  const auto labels = train_.labels();
  const bool with_mpmmd = cfg_.normalizer == Normalizer::chase && train_.sample_shape()[3] >= 2;
  double loss_sum = 0.0, cls_sum = 0.0, mmd_sum = 0.0;
  Index seen = 0;
  try {
    for (Index start = 0; start + 2 <= n; start += cfg_.batch_size) {
      const Index len = std::min(cfg_.batch_size, n - start);
      if (len < 2) break;  // BatchNorm and the pair statistics need two samples
      const std::span<const Index> idx(order.data() + start, static_cast<std::size_t>(len));
      std::vector<int> batch_labels;
      for (Index i : idx) batch_labels.push_back(labels[static_cast<std::size_t>(i)]);

      const TensorXd batch = skel::stack_coords(train_, idx);
      const ForwardResult fwd = model_.forward(batch, skel::Mode::train, derive_seed({cfg_.seed, stream::train_augment, step_}));
      std::vector<shift::EntityPair> pairs;
      disc::MpmmdOptions mopts;
      if (with_mpmmd) {
        pairs = shift::sample_pairs(batch.dim(4), cfg_.pairs_per_batch, derive_seed({cfg_.seed, stream::pairs, step_}));
        mopts.points_per_entity = cfg_.points_per_entity;
        mopts.subsample_seed = derive_seed({cfg_.seed, stream::subsample, step_});
      }
      const LossTerms loss = total_loss(fwd.logits, batch_labels, fwd.x_hat, pairs, cfg_.lambda, mopts);

      opt_.zero_grad();
      backward(loss.total);
      opt_.step(log.lr);
      ++step_;

      const double w = static_cast<double>(len);
      loss_sum += w * loss.total.item();
      cls_sum += w * loss.cls.item();
      if (loss.mpmmd) mmd_sum += w * loss.mpmmd->item();
      seen += len;
    }
    for (const auto& p : opt_.params()) {
      if (!p.tensor().all_finite()) throw NumericalError("parameter update produced a non-finite value");
    }
  } catch (const NumericalError& e) {
    throw NumericalError("epoch " + std::to_string(epoch_) + ": " + e.what());
  }
  log.train_loss = loss_sum / static_cast<double>(seen);
  log.cls_loss = cls_sum / static_cast<double>(seen);
  if (with_mpmmd) log.mpmmd = mmd_sum / static_cast<double>(seen);
  ++epoch_;
  if (eval_ && !eval_->empty()) log.eval_acc = evaluate(model_, *eval_);
  return log;
}

namespace {

// Fields allowed to differ between a checkpoint and the run resuming it.
nlohmann::json comparable(nlohmann::json j) {
  j.erase("epochs");
  return j;
}

}  // namespace

Checkpoint Trainer::checkpoint() const {
  Checkpoint c;
  c.tensors = model_.state();
  for (std::size_t k = 0; k < param_names_.size(); ++k) {
    c.tensors.emplace_back("opt.velocity." + param_names_[k], opt_.velocity()[k]);
  }
  c.epoch = static_cast<std::uint64_t>(epoch_);
  c.step = step_;
  c.seed = cfg_.seed;
  c.config = cfg_;
  return c;
}

void Trainer::restore(const Checkpoint& ckpt) {
  if (comparable(ckpt.config) != comparable(nlohmann::json(cfg_))) {
    throw ConfigError("checkpoint was written with a different configuration: " + ckpt.config.dump());
  }
  if (ckpt.seed != cfg_.seed) throw ConfigError("seed: checkpoint seed differs");
  model_.load_state(ckpt);
  for (std::size_t k = 0; k < param_names_.size(); ++k) {
    const std::string name = "opt.velocity." + param_names_[k];
    const TensorXd& v = ckpt.tensor(name);
    if (v.shape() != opt_.velocity()[k].shape()) throw FormatError("checkpoint tensor '" + name + "' has wrong shape", 0);
    opt_.velocity()[k] = v;
  }
  epoch_ = static_cast<Index>(ckpt.epoch);
  step_ = ckpt.step;
}

}  // namespace chase::train
