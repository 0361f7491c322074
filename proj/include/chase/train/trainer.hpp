#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chase/disc/mmd.hpp"
#include "chase/shift/clb.hpp"
#include "chase/skel/augment.hpp"
#include "chase/skel/normalize.hpp"
#include "chase/train/checkpoint.hpp"
#include "chase/train/config.hpp"

namespace chase::train {

struct ForwardResult {
  Value x_hat;   // normalised input, (N, C, T, J, E)
  Value logits;  // (N, K)
};

/// Normaliser + backbone. The CLB exists only for Normalizer::chase.
class Model {
 public:
  Model() = default;
  /// sample_shape is (C, T, J, E).
  static Model init(const TrainConfig& cfg, const Shape& sample_shape);

  /// Train mode applies training-time augmentation (seeded per sample from
  /// aug_seed) and updates BatchNorm running statistics.
  ForwardResult forward(const TensorXd& batch, skel::Mode mode, std::uint64_t aug_seed = 0);

  /// One sequence as the backbone sees it at evaluation time.
  skel::SkeletonSequence normalize_eval(const skel::SkeletonSequence& x);

  std::vector<std::pair<std::string, Value>> named_parameters() const;
  /// Parameters plus BatchNorm running statistics.
  std::vector<std::pair<std::string, TensorXd>> state() const;
  /// Restores every entry of state() by name; throws FormatError when one is
  /// missing or has the wrong shape.
  void load_state(const Checkpoint& ckpt);

  Normalizer normalizer() const { return normalizer_; }
  const std::optional<shift::ClbParams>& clb() const { return clb_; }
  const Backbone& backbone() const { return backbone_; }
  const Shape& sample_shape() const { return sample_shape_; }

 private:
  Normalizer normalizer_ = Normalizer::vanilla;
  Shape sample_shape_;
  double aug_range_ = 0.0;
  std::optional<shift::ClbParams> clb_;
  Backbone backbone_;
  skel::BatchNorm bn_;
};

struct LossTerms {
  Value total;
  Value cls;
  std::optional<Value> mpmmd;
};

/// cross_entropy + lambda * mpmmd. With lambda == 0 the total is the
/// classification loss itself. Pass pairs empty to skip the MPMMD term.
LossTerms total_loss(const Value& logits, std::span<const int> labels, const Value& x_hat,
                     std::span<const shift::EntityPair> pairs, double lambda, const disc::MpmmdOptions& opts = {});

/// Fraction of rows whose argmax (first maximum on ties) equals the label.
double top1_accuracy(const TensorXd& logits, std::span<const int> labels);

/// Top-1 accuracy in eval mode. A corruption, when given, is applied to
/// sample i with its own seed derived from (cfg.seed, i).
double evaluate(Model& model, const skel::Dataset& data, const std::optional<skel::CorruptionConfig>& corruption = {},
                Index batch_size = 256);

struct EpochLog {
  Index epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double cls_loss = 0.0;
  std::optional<double> mpmmd;
  std::optional<double> eval_acc;
};

/// One JSON line; mpmmd and eval_acc are omitted when absent.
nlohmann::json to_json(const EpochLog& log);

/// Mini-batch SGD over the training set. Every random choice is keyed by
/// (seed, epoch) or (seed, step), so a run restored from a checkpoint
/// continues exactly as the uninterrupted run would.
class Trainer {
 public:
  /// Validates the configuration and dataset before any step is taken.
  Trainer(TrainConfig cfg, const skel::Dataset& train, const skel::Dataset* eval = nullptr);

  /// Runs the next epoch. Throws NumericalError (naming the epoch) on a
  /// non-finite value.
  EpochLog run_epoch();
  bool done() const { return epoch_ >= cfg_.epochs; }
  Index epoch() const { return epoch_; }
  std::uint64_t step() const { return step_; }

  Checkpoint checkpoint() const;
  /// Throws ConfigError when the checkpoint was written under a different
  /// configuration (the epoch budget may differ).
  void restore(const Checkpoint& ckpt);

  Model& model() { return model_; }
  const TrainConfig& config() const { return cfg_; }

 private:
  TrainConfig cfg_;
  const skel::Dataset& train_;
  const skel::Dataset* eval_;
  Model model_;
  NesterovSgd opt_;
  std::vector<std::string> param_names_;
  Index epoch_ = 0;
  std::uint64_t step_ = 0;
};

}  // namespace chase::train
