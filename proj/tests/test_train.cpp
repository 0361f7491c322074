#include <doctest.h>

#include <cmath>

#include "chase/core/bytes.hpp"
#include "chase/skel/synth.hpp"
#include "chase/train/trainer.hpp"
#include "support.hpp"

using namespace chase;
using namespace chase::train;
using testing::random_tensor;

namespace {

// Swaps entities by the permutation `perm` (output e = input perm[e]).
TensorXd permute_entities(const TensorXd& x, const std::vector<Index>& perm) {
  TensorXd out(x.shape());
  const Index E = x.dim(4), inner = x.size() / E;
  for (Index i = 0; i < inner; ++i)
    for (Index e = 0; e < E; ++e) out[i * E + e] = x[i * E + perm[static_cast<std::size_t>(e)]];
  return out;
}

skel::SynthSplits small_synth(Index per_class, std::uint64_t seed) {
  auto cfg = skel::SynthConfig::defaults();
  cfg.train_per_class = per_class;
  cfg.test_per_class = per_class / 2;
  cfg.seed = seed;
  return skel::synth_generate(cfg);
}

TrainConfig small_config(Normalizer n) {
  TrainConfig cfg;
  cfg.normalizer = n;
  cfg.epochs = 4;
  cfg.batch_size = 8;
  cfg.sgd.decay_epochs = {3};
  cfg.backbone.hidden_widths = {16};
  cfg.backbone.feature_dim = 8;
  cfg.clb.c1 = 8;
  cfg.clb.c2 = 3;
  cfg.points_per_entity = 32;
  cfg.seed = 5;
  return cfg;
}

double dataset_loss(Model& model, const skel::Dataset& d) {
  std::vector<Index> idx(d.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  const auto out = model.forward(skel::stack_coords(d, idx), skel::Mode::eval);
  return cross_entropy(out.logits, d.labels()).item();
}

}  // namespace

TEST_CASE("backbone") {
  BackboneConfig cfg;
  cfg.hidden_widths = {7, 5};
  cfg.feature_dim = 6;
  cfg.num_classes = 3;
  std::mt19937_64 rng(1);

  SUBCASE("one entity: a plain MLP on the flattened sample") {
    const auto net = Backbone::init(cfg, 2 * 3 * 2, 4);
    const TensorXd x = random_tensor({3, 2, 3, 2, 1}, rng);
    const auto logits = net.forward(Value(x)).tensor();
    REQUIRE(logits.shape() == Shape{3, 3});
    const auto params = net.named_parameters();
    auto get = [&](const std::string& name) {
      for (const auto& [n, v] : params)
        if (n == name) return Eigen::MatrixXd(v.tensor().matrix(v.tensor().size() / v.tensor().shape().back(),
                                                                v.tensor().shape().back()));
      FAIL("missing " << name);
      return Eigen::MatrixXd();
    };
    Eigen::MatrixXd h = x.matrix(3, 12);
    for (const std::string layer : {"backbone.layer0", "backbone.layer1", "backbone.layer2"}) {
      h = (h * get(layer + ".weight")).rowwise() + get(layer + ".bias").row(0);
      h = h.cwiseMax(0.0);
    }
    const Eigen::MatrixXd ref = (h * get("backbone.head.weight")).rowwise() + get("backbone.head.bias").row(0);
    CHECK((ref - Eigen::MatrixXd(logits.matrix())).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("entity order does not matter, exactly") {
    const auto net = Backbone::init(cfg, 2 * 3 * 2, 4);
    const TensorXd x = random_tensor({4, 2, 3, 2, 3}, rng, -3, 3);
    const auto base = net.forward(Value(x)).tensor();
    for (const std::vector<Index>& perm :
         {std::vector<Index>{1, 0, 2}, {2, 1, 0}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}}) {
      CHECK(net.forward(Value(permute_entities(x, perm))).tensor() == base);
    }
  }
  SUBCASE("shape and config errors") {
    const auto net = Backbone::init(cfg, 12, 0);
    CHECK_THROWS_AS(net.forward(Value(TensorXd(Shape{1, 2, 3, 3, 2}))), DimensionError);
    BackboneConfig bad = cfg;
    bad.hidden_widths = {0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }
}

TEST_CASE("total_loss") {
  std::mt19937_64 rng(2);
  const TensorXd logits = random_tensor({3, 4}, rng);
  const std::vector<int> labels{0, 3, 1};
  const Value x(random_tensor({3, 2, 2, 3, 2}, rng));
  const auto pairs = shift::all_pairs(2);

  const Value cls = cross_entropy(Value(logits), labels);
  const auto zero = total_loss(Value(logits), labels, x, pairs, 0.0);
  CHECK(zero.total.item() == cls.item());

  const auto full = total_loss(Value(logits), labels, x, pairs, 0.1);
  REQUIRE(full.mpmmd);
  CHECK(full.total.item() == doctest::Approx(cls.item() + 0.1 * full.mpmmd->item()).epsilon(1e-15));
  CHECK(full.mpmmd->item() > 0.0);

  TensorXd same = x.tensor();
  for (Index i = 0; i < same.size(); i += 2) same[i + 1] = same[i];
  const auto twin = total_loss(Value(logits), labels, Value(same), pairs, 0.1);
  CHECK(std::abs(twin.total.item() - cls.item()) < 1e-12);

  CHECK_FALSE(total_loss(Value(logits), labels, x, {}, 0.1).mpmmd);
}

TEST_CASE("optimizer") {
  SUBCASE("plain step") {
    Value p(TensorXd({1}, {1.0}), true);
    NesterovSgd opt({p}, 0.0);
    backward(scale(p, 2.0));
    opt.step(0.1);
    CHECK(p.tensor()[0] == doctest::Approx(0.8).epsilon(1e-15));
  }
  SUBCASE("momentum recurrence on a constant gradient") {
    Value p(TensorXd({1}, {0.0}), true);
    NesterovSgd opt({p}, 0.9);
    const double g = 3.0, lr = 0.01;
    for (int k = 0; k < 2; ++k) {
      opt.zero_grad();
      backward(scale(p, g));
      opt.step(lr);
    }
    CHECK(opt.velocity()[0][0] == doctest::Approx(1.9 * g).epsilon(1e-15));
    const double p1 = -lr * (g + 0.9 * g);
    const double p2 = p1 - lr * (g + 0.9 * 1.9 * g);
    CHECK(p.tensor()[0] == doctest::Approx(p2).epsilon(1e-14));
  }
  SUBCASE("momentum 0 equals gradient descent exactly") {
    std::mt19937_64 rng(3);
    const TensorXd w0 = random_tensor({3, 2}, rng);
    Value p(w0, true);
    NesterovSgd opt({p}, 0.0);
    backward(sum(mul(p, p)));
    opt.step(0.05);
    TensorXd expect = w0;
    expect.data() -= 0.05 * (2.0 * w0.data());
    CHECK(p.tensor() == expect);
  }
  SUBCASE("missing gradients") {
    Value p(TensorXd({1}, {1.0}), true);
    NesterovSgd opt({p}, 0.9);
    CHECK_THROWS_AS(opt.step(0.1), UsageError);
  }
  SUBCASE("schedule") {
    SgdConfig cfg;
    CHECK(scheduled_lr(cfg, 0) == 0.1);
    CHECK(scheduled_lr(cfg, 19) == 0.1);
    CHECK(scheduled_lr(cfg, 20) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(scheduled_lr(cfg, 24) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(scheduled_lr(cfg, 25) == doctest::Approx(0.001).epsilon(1e-15));
    cfg.lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
}

TEST_CASE("config") {
  TrainConfig cfg;
  CHECK(cfg.lambda == 0.1);
  CHECK(cfg.sgd.momentum == 0.9);
  nlohmann::json j;
  to_json(j, cfg);
  TrainConfig back;
  from_json(j, back);
  nlohmann::json j2;
  to_json(j2, back);
  CHECK(j == j2);

  j["lambda"] = -1.0;
  CHECK_THROWS_AS(from_json(j, back), ConfigError);
  j["lambda"] = 0.1;
  j["lamda"] = 0.1;
  CHECK_THROWS_AS(from_json(j, back), ConfigError);
  CHECK_THROWS_AS(parse_normalizer("layernorm"), ConfigError);
  for (auto n : {Normalizer::vanilla, Normalizer::s2com, Normalizer::s2com_global, Normalizer::s2com_global_std,
                 Normalizer::batchnorm, Normalizer::aug, Normalizer::er, Normalizer::chase})
    CHECK(parse_normalizer(to_string(n)) == n);
}

TEST_CASE("checkpoint encoding") {
  Checkpoint c;
  c.epoch = 3;
  c.step = 77;
  c.seed = 9;
  c.config = {{"lr", 0.1}};
  std::mt19937_64 rng(4);
  c.tensors.push_back({"a", random_tensor({2, 3}, rng)});
  c.tensors.push_back({"b.c", random_tensor({4}, rng)});
  const auto bytes = encode_checkpoint(c);
  CHECK(decode_checkpoint(bytes) == c);
  CHECK(c.has("b.c"));
  CHECK_THROWS_AS(c.tensor("zzz"), FormatError);

  auto trailing = bytes;
  trailing.push_back(1);
  CHECK_THROWS_AS(decode_checkpoint(trailing), FormatError);
  auto cut = bytes;
  cut.resize(cut.size() - 5);
  CHECK_THROWS_AS(decode_checkpoint(cut), FormatError);
  auto magic = bytes;
  magic[1] = 'X';
  try {
    decode_checkpoint(magic);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 0);
  }

  testing::TempDir dir;
  save_checkpoint(dir.file("c.chck"), c);
  CHECK(load_checkpoint(dir.file("c.chck")) == c);
}

TEST_CASE("accuracy and evaluation") {
  SUBCASE("random logits sit at chance") {
    std::mt19937_64 rng(5);
    const TensorXd logits = random_tensor({20000, 4}, rng);
    std::vector<int> labels(20000);
    std::uniform_int_distribution<int> k(0, 3);
    for (int& l : labels) l = k(rng);
    CHECK(std::abs(top1_accuracy(logits, labels) - 0.25) < 0.03);
  }
  SUBCASE("ties resolve to the first maximum") {
    CHECK(top1_accuracy(TensorXd({2, 3}, {1, 1, 0, 0, 2, 2}), std::vector<int>{0, 1}) == 1.0);
  }
  SUBCASE("corruption") {
    const auto data = small_synth(10, 1);
    auto cfg = small_config(Normalizer::s2com_global);
    auto model = Model::init(cfg, data.train.sample_shape());
    const double clean = evaluate(model, data.test);
    CHECK(evaluate(model, data.test, skel::CorruptionConfig{0.0, 0.0, 9}) == clean);
    const skel::CorruptionConfig noisy{0.3, 0.1, 2};
    CHECK(evaluate(model, data.test, noisy) == evaluate(model, data.test, noisy));
  }
}

TEST_CASE("training") {
  SUBCASE("loss decreases on a separable toy set within one epoch") {
    // Class = sign of entity 1's x offset relative to entity 0.
    skel::Dataset toy;
    std::mt19937_64 rng(6);
    for (int n = 0; n < 8; ++n) {
      TensorXd x = random_tensor({2, 2, 2, 2}, rng, -0.1, 0.1);
      const int label = n % 2;
      for (Index t = 0; t < 2; ++t)
        for (Index j = 0; j < 2; ++j) x({0, t, j, 1}) += label ? 1.0 : -1.0;
      toy.samples.push_back(skel::make_sequence(std::move(x), label));
    }
    auto cfg = small_config(Normalizer::vanilla);
    cfg.lambda = 0.0;
    cfg.epochs = 1;
    cfg.batch_size = 2;
    cfg.sgd.lr = 0.05;
    cfg.backbone.num_classes = 2;
    Trainer trainer(cfg, toy);
    const double before = dataset_loss(trainer.model(), toy);
    const auto log = trainer.run_epoch();
    CHECK(dataset_loss(trainer.model(), toy) < before);
    CHECK_FALSE(log.mpmmd);
    CHECK(trainer.done());
    CHECK(trainer.step() == 4);
    CHECK_THROWS_AS(trainer.run_epoch(), UsageError);
  }

  const auto data = small_synth(16, 2);

  SUBCASE("runs are reproducible and resumable") {
    const auto cfg = small_config(Normalizer::chase);
    Trainer a(cfg, data.train, &data.test), b(cfg, data.train, &data.test);
    std::vector<std::string> la, lb;
    Checkpoint mid;
    while (!a.done()) {
      la.push_back(to_json(a.run_epoch()).dump());
      if (a.epoch() == 2) mid = decode_checkpoint(encode_checkpoint(a.checkpoint()));
    }
    while (!b.done()) lb.push_back(to_json(b.run_epoch()).dump());
    CHECK(la == lb);
    const auto log = nlohmann::json::parse(la.front());
    CHECK(log.contains("mpmmd"));
    CHECK(log.contains("eval_acc"));

    Trainer c(cfg, data.train, &data.test);
    c.restore(mid);
    CHECK(c.epoch() == 2);
    std::vector<std::string> lc;
    while (!c.done()) lc.push_back(to_json(c.run_epoch()).dump());
    CHECK(lc == std::vector<std::string>(la.begin() + 2, la.end()));
    CHECK(encode_checkpoint(c.checkpoint()) == encode_checkpoint(a.checkpoint()));

    auto other = cfg;
    other.lambda = 0.5;
    Trainer d(other, data.train);
    CHECK_THROWS_AS(d.restore(mid), ConfigError);
  }

  SUBCASE("every normaliser trains") {
    for (auto n : {Normalizer::vanilla, Normalizer::s2com, Normalizer::s2com_global, Normalizer::s2com_global_std,
                   Normalizer::batchnorm, Normalizer::aug, Normalizer::er, Normalizer::chase}) {
      INFO(to_string(n));
      auto cfg = small_config(n);
      cfg.epochs = 1;
      Trainer t(cfg, data.train, &data.test);
      const auto log = t.run_epoch();
      CHECK(std::isfinite(log.train_loss));
      CHECK(log.eval_acc.has_value());
      CHECK(log.mpmmd.has_value() == (n == Normalizer::chase));
      // A checkpoint restores into a fresh model with identical predictions.
      auto fresh = Model::init(cfg, data.train.sample_shape());
      fresh.load_state(t.checkpoint());
      CHECK(evaluate(fresh, data.test) == evaluate(t.model(), data.test));
    }
  }

  SUBCASE("entity order of the test set does not change predictions") {
    auto cfg = small_config(Normalizer::chase);
    Trainer t(cfg, data.train);
    while (!t.done()) t.run_epoch();
    skel::Dataset swapped = data.test;
    for (auto& s : swapped.samples) {
      TensorXd y(s.coords.shape());
      for (Index i = 0; i < y.size(); i += 2) y[i] = s.coords[i + 1], y[i + 1] = s.coords[i];
      s.coords = y;
    }
    CHECK(evaluate(t.model(), swapped) == evaluate(t.model(), data.test));
  }

  SUBCASE("configuration errors surface before the first step") {
    auto cfg = small_config(Normalizer::chase);
    cfg.backbone.num_classes = 2;
    CHECK_THROWS_AS(Trainer(cfg, data.train), ConfigError);
    cfg = small_config(Normalizer::chase);
    cfg.clb.c1 = 1000;
    CHECK_THROWS_AS(Trainer(cfg, data.train), ConfigError);
  }

  SUBCASE("divergence is reported as a numerical error") {
    auto cfg = small_config(Normalizer::vanilla);
    cfg.sgd.lr = 1e200;
    Trainer t(cfg, data.train);
    CHECK_THROWS_AS(
        [&] {
          while (!t.done()) t.run_epoch();
        }(),
        NumericalError);
  }
}
