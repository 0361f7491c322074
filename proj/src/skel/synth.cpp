#include "chase/skel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chase/core/random.hpp"

namespace chase::skel {

SynthConfig SynthConfig::defaults(Index channels, Index entities) {
  SynthConfig cfg;
  cfg.channels = channels;
  cfg.entities = entities;
  const std::vector<double> shift{3.0, -2.0, 1.0};
  cfg.train_offset_means.assign(entities, std::vector<double>(channels, 0.0));
  cfg.test_offset_means.assign(entities, std::vector<double>(shift.begin(), shift.begin() + channels));
  return cfg;
}

void SynthConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("synth." + field + ": " + why);
  };
  if (num_classes < 2) fail("num_classes", "must be >= 2");
  if (train_per_class < 1) fail("train_per_class", "must be >= 1");
  if (test_per_class < 1) fail("test_per_class", "must be >= 1");
  if (channels != 2 && channels != 3) fail("channels", "must be 2 or 3");
  if (frames < 1) fail("frames", "must be >= 1");
  if (joints < 1) fail("joints", "must be >= 1");
  if (entities < 2) fail("entities", "relative geometry needs >= 2 entities");
  for (const auto* means : {&train_offset_means, &test_offset_means}) {
    const std::string name = means == &train_offset_means ? "train_offset_means" : "test_offset_means";
    if (static_cast<Index>(means->size()) != entities) fail(name, "needs one row per entity");
    for (std::size_t e = 0; e < means->size(); ++e) {
      if (static_cast<Index>((*means)[e].size()) != channels) {
        fail(name + "[" + std::to_string(e) + "]", "needs one value per channel");
      }
      for (double v : (*means)[e]) {
        if (!std::isfinite(v)) fail(name + "[" + std::to_string(e) + "]", "non-finite value");
      }
    }
  }
  // Splits must differ by one rigid shift so labels stay a function of
  // relative geometry alone.
  bool differs = false;
  for (Index c = 0; c < channels; ++c) {
    const double shift = test_offset_means[0][c] - train_offset_means[0][c];
    if (shift != 0.0) differs = true;
    for (Index e = 1; e < entities; ++e) {
      if (test_offset_means[e][c] - train_offset_means[e][c] != shift) {
        fail("test_offset_means[" + std::to_string(e) + "]", "train/test shift must be identical for all entities");
      }
    }
  }
  if (!differs) fail("test_offset_means", "must differ from train_offset_means");
  if (!(offset_spread >= 0.0)) fail("offset_spread", "must be non-negative");
  if (!(relative_geometry_scale >= 0.0)) fail("relative_geometry_scale", "must be non-negative");
  if (!(motion_noise >= 0.0)) fail("motion_noise", "must be non-negative");
  if (!(pose_scale >= 0.0)) fail("pose_scale", "must be non-negative");
  if (!(motion_amplitude >= 0.0)) fail("motion_amplitude", "must be non-negative");
}

void to_json(nlohmann::json& j, const SynthConfig& cfg) {
  j = nlohmann::json{{"num_classes", cfg.num_classes},
                     {"train_per_class", cfg.train_per_class},
                     {"test_per_class", cfg.test_per_class},
                     {"channels", cfg.channels},
                     {"frames", cfg.frames},
                     {"joints", cfg.joints},
                     {"entities", cfg.entities},
                     {"train_offset_means", cfg.train_offset_means},
                     {"test_offset_means", cfg.test_offset_means},
                     {"offset_spread", cfg.offset_spread},
                     {"relative_geometry_scale", cfg.relative_geometry_scale},
                     {"motion_noise", cfg.motion_noise},
                     {"pose_scale", cfg.pose_scale},
                     {"motion_amplitude", cfg.motion_amplitude},
                     {"seed", cfg.seed}};
}

void from_json(const nlohmann::json& j, SynthConfig& cfg) {
  const Index channels = j.value("channels", cfg.channels);
  const Index entities = j.value("entities", cfg.entities);
  SynthConfig base = SynthConfig::defaults(channels, entities);
  auto get = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("synth.") + key + ": " + e.what());
    }
  };
  get("num_classes", base.num_classes);
  get("train_per_class", base.train_per_class);
  get("test_per_class", base.test_per_class);
  get("frames", base.frames);
  get("joints", base.joints);
  get("train_offset_means", base.train_offset_means);
  get("test_offset_means", base.test_offset_means);
  get("offset_spread", base.offset_spread);
  get("relative_geometry_scale", base.relative_geometry_scale);
  get("motion_noise", base.motion_noise);
  get("pose_scale", base.pose_scale);
  get("motion_amplitude", base.motion_amplitude);
  get("seed", base.seed);
  for (const auto& [key, _] : j.items()) {
    static const std::vector<std::string> known{
        "num_classes",   "train_per_class",         "test_per_class", "channels",   "frames",
        "joints",        "entities",                "train_offset_means", "test_offset_means",
        "offset_spread", "relative_geometry_scale", "motion_noise",   "pose_scale", "motion_amplitude",
        "seed"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("synth." + key + ": unknown field");
    }
  }
  cfg = std::move(base);
}

namespace {

struct Templates {
  // pose[e] is J x C, zero mean over joints.
  std::vector<RowMatrix<double>> pose;
  // phase[e][j]
  std::vector<std::vector<double>> phase;
};

Templates make_templates(const SynthConfig& cfg) {
  auto rng = make_rng({cfg.seed, stream::synth_pose});
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  Templates t;
  for (Index e = 0; e < cfg.entities; ++e) {
    RowMatrix<double> pose(cfg.joints, cfg.channels);
    for (Index j = 0; j < cfg.joints; ++j)
      for (Index c = 0; c < cfg.channels; ++c) pose(j, c) = cfg.pose_scale * u(rng);
    pose.rowwise() -= pose.colwise().mean();
    t.pose.push_back(std::move(pose));
    std::vector<double> ph(static_cast<std::size_t>(cfg.joints));
    for (double& p : ph) p = angle(rng);
    t.phase.push_back(std::move(ph));
  }
  return t;
}

SkeletonSequence make_sample(const SynthConfig& cfg, const Templates& tpl,
                             const std::vector<std::vector<double>>& means, std::uint64_t split, Index index,
                             int label) {
  const double pi = std::numbers::pi;
  const Index C = cfg.channels, T = cfg.frames, J = cfg.joints, E = cfg.entities;
  auto rng = make_rng({cfg.seed, stream::synth_sample, split, static_cast<std::uint64_t>(index)});
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ColVector<double> jitter(C);
  for (Index c = 0; c < C; ++c) jitter[c] = cfg.offset_spread * gauss(rng);

  // Sector k is centred on angle 2 pi k / K + pi / K; the draw stays within
  // the middle half of the sector.
  const double K = static_cast<double>(cfg.num_classes);
  const double sector = 2.0 * pi / K;
  const double theta = sector * label + sector / 2.0 + (unit(rng) - 0.5) * sector / 2.0;
  const double radius = cfg.relative_geometry_scale * std::numbers::sqrt2 * (0.75 + 0.5 * unit(rng));
  std::vector<ColVector<double>> displacement(static_cast<std::size_t>(E), ColVector<double>::Zero(C));
  displacement[1][0] = radius * std::cos(theta);
  displacement[1][1] = radius * std::sin(theta);
  for (Index e = 2; e < E; ++e) {
    const double a = 2.0 * pi * unit(rng);
    displacement[e][0] = cfg.relative_geometry_scale * std::numbers::sqrt2 * std::cos(a);
    displacement[e][1] = cfg.relative_geometry_scale * std::numbers::sqrt2 * std::sin(a);
  }

  TensorXd coords(Shape{C, T, J, E});
  for (Index e = 0; e < E; ++e) {
    for (Index t = 0; t < T; ++t) {
      for (Index j = 0; j < J; ++j) {
        for (Index c = 0; c < C; ++c) {
          const double wave =
              std::sin(2.0 * pi * static_cast<double>(t) / static_cast<double>(T) + tpl.phase[e][j] + c * pi / 2.0);
          const double v = means[e][c] + jitter[c] + displacement[e][c] + tpl.pose[e](j, c) +
                           cfg.motion_amplitude * wave + cfg.motion_noise * gauss(rng);
          coords({c, t, j, e}) = static_cast<double>(static_cast<float>(v));
        }
      }
    }
  }
  return make_sequence(std::move(coords), label);
}

Dataset make_split(const SynthConfig& cfg, const Templates& tpl, std::uint64_t split) {
  const auto& means = split == 0 ? cfg.train_offset_means : cfg.test_offset_means;
  const Index per = split == 0 ? cfg.train_per_class : cfg.test_per_class;
  Dataset d;
  d.seed = cfg.seed;
  to_json(d.generator, cfg);
  d.generator["split"] = split == 0 ? "train" : "test";
  for (int k = 0; k < cfg.num_classes; ++k) d.class_names.push_back("sector_" + std::to_string(k));
  d.samples.reserve(static_cast<std::size_t>(per * cfg.num_classes));
  for (int k = 0; k < cfg.num_classes; ++k) {
    for (Index i = 0; i < per; ++i) d.samples.push_back(make_sample(cfg, tpl, means, split, k * per + i, k));
  }
  return d;
}

}  // namespace

SynthSplits synth_generate(const SynthConfig& cfg) {
  cfg.validate();
  const Templates tpl = make_templates(cfg);
  return {make_split(cfg, tpl, 0), make_split(cfg, tpl, 1)};
}

}  // namespace chase::skel
