#include "chase/train/config.hpp"

#include <array>
#include <utility>

namespace chase::train {

namespace {

constexpr std::array<std::pair<Normalizer, const char*>, 8> kNames{{
    {Normalizer::vanilla, "vanilla"},
    {Normalizer::s2com, "s2com"},
    {Normalizer::s2com_global, "s2com_global"},
    {Normalizer::s2com_global_std, "s2com_global_std"},
    {Normalizer::batchnorm, "batchnorm"},
    {Normalizer::aug, "aug"},
    {Normalizer::er, "er"},
    {Normalizer::chase, "chase"},
}};

template <typename T>
T get_as(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(key + ": wrong type (" + v.dump() + ")");
  }
}

}  // namespace

std::string to_string(Normalizer n) {
  for (const auto& [k, name] : kNames)
    if (k == n) return name;
  return "unknown";
}

Normalizer parse_normalizer(const std::string& name) {
  for (const auto& [k, n] : kNames)
    if (name == n) return k;
  std::string all;
  for (const auto& entry : kNames) all += std::string(all.empty() ? "" : ", ") + entry.second;
  throw ConfigError("normalizer: unknown value '" + name + "' (expected one of " + all + ")");
}

void TrainConfig::validate() const {
  sgd.validate();
  if (epochs < 1) throw ConfigError("epochs: must be >= 1");
  if (batch_size < 2) throw ConfigError("batch_size: must be >= 2");
  if (!(lambda >= 0.0)) throw ConfigError("lambda: must be non-negative");
  if (pairs_per_batch < 1) throw ConfigError("M: must be >= 1");
  if (points_per_entity < 2) throw ConfigError("points_per_entity: must be >= 2");
  if (!(aug_range >= 0.0)) throw ConfigError("aug_range: must be non-negative");
  if (clb.c1 < 1 || clb.c2 < 1) throw ConfigError("clb: widths must be positive");
  if (clb.seg.t < 1 || clb.seg.j < 1 || clb.seg.e < 1) throw ConfigError("clb.seg: entries must be positive");
  backbone.validate();
}

void to_json(nlohmann::json& j, const TrainConfig& cfg) {
  j = nlohmann::json{
      {"lr", cfg.sgd.lr},
      {"momentum", cfg.sgd.momentum},
      {"lr_decay_epochs", cfg.sgd.decay_epochs},
      {"decay_rate", cfg.sgd.decay_rate},
      {"epochs", cfg.epochs},
      {"batch_size", cfg.batch_size},
      {"lambda", cfg.lambda},
      {"M", cfg.pairs_per_batch},
      {"seed", cfg.seed},
      {"normalizer", to_string(cfg.normalizer)},
      {"backbone", cfg.backbone},
      {"clb", {{"c1", cfg.clb.c1}, {"c2", cfg.clb.c2}, {"seg", {cfg.clb.seg.t, cfg.clb.seg.j, cfg.clb.seg.e}}}},
      {"points_per_entity", cfg.points_per_entity},
      {"aug_range", cfg.aug_range},
  };
}

void from_json(const nlohmann::json& j, TrainConfig& cfg) {
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "lr") cfg.sgd.lr = get_as<double>(v, key);
    else if (key == "momentum") cfg.sgd.momentum = get_as<double>(v, key);
    else if (key == "lr_decay_epochs") cfg.sgd.decay_epochs = get_as<std::vector<Index>>(v, key);
    else if (key == "decay_rate") cfg.sgd.decay_rate = get_as<double>(v, key);
    else if (key == "epochs") cfg.epochs = get_as<Index>(v, key);
    else if (key == "batch_size") cfg.batch_size = get_as<Index>(v, key);
    else if (key == "lambda") cfg.lambda = get_as<double>(v, key);
    else if (key == "M") cfg.pairs_per_batch = get_as<Index>(v, key);
    else if (key == "seed") cfg.seed = get_as<std::uint64_t>(v, key);
    else if (key == "normalizer") cfg.normalizer = parse_normalizer(get_as<std::string>(v, key));
    else if (key == "backbone") {
      if (!v.is_object()) throw ConfigError("backbone: must be an object");
      from_json(v, cfg.backbone);
    } else if (key == "clb") {
      if (!v.is_object()) throw ConfigError("clb: must be an object");
      for (const auto& [k2, v2] : v.items()) {
        if (k2 == "c1") cfg.clb.c1 = get_as<Index>(v2, "clb.c1");
        else if (k2 == "c2") cfg.clb.c2 = get_as<Index>(v2, "clb.c2");
        else if (k2 == "seg") {
          const auto s = get_as<std::vector<Index>>(v2, "clb.seg");
          if (s.size() != 3) throw ConfigError("clb.seg: expected [t, j, e]");
          cfg.clb.seg = {s[0], s[1], s[2]};
        } else throw ConfigError("clb." + k2 + ": unknown key");
      }
    } else if (key == "points_per_entity") cfg.points_per_entity = get_as<Index>(v, key);
    else if (key == "aug_range") cfg.aug_range = get_as<double>(v, key);
    else throw ConfigError(key + ": unknown key");
  }
  cfg.validate();
}

}  // namespace chase::train
