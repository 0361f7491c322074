// chase: command-line front end (synth, train, eval, discrepancy, gradcheck, params).
//
// Exit codes: 0 success, 1 check failure, 2 usage/configuration, 3 numerical failure.

#include <Eigen/Core>
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chase/core/errors.hpp"
#include "chase/disc/report.hpp"
#include "chase/shift/accounting.hpp"
#include "chase/skel/io.hpp"
#include "chase/skel/normalize.hpp"
#include "chase/skel/synth.hpp"
#include "chase/train/gradcheck_suite.hpp"
#include "chase/train/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kNumerical = 3 };

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string config;
  bool quiet = false;
  bool overwrite = false;
  int threads = 1;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw chase::ConfigError("cannot read config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw chase::ConfigError(path + ": invalid JSON: " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

/// Every command that writes files records what it did.
class Run {
 public:
  Run(const Globals& g, std::string command, std::string run_id)
      : g_(g), command_(std::move(command)), run_id_(std::move(run_id)) {
    fs::create_directories(g_.out);
    manifest_ = fs::path(g_.out) / (run_id_ + ".manifest.json");
    if (fs::exists(manifest_) && !g_.overwrite) {
      throw chase::UsageError("run '" + run_id_ + "' already exists in " + g_.out +
                              " (manifest " + manifest_.string() + "); pass --overwrite to replace it");
    }
  }

  fs::path path(const std::string& suffix) {
    fs::path p = fs::path(g_.out) / (run_id_ + suffix);
    artifacts_.push_back(p.string());
    return p;
  }
  void add_artifact(const fs::path& p) { artifacts_.push_back(p.string()); }

  void finish(const json& config, std::uint64_t seed) {
    json m{{"run_id", run_id_},     {"command", command_},          {"config", config},
           {"seed", seed},          {"artifacts", artifacts_},      {"tool_version", kToolVersion},
           {"threads", g_.threads}};
    write_text(manifest_, m.dump(2) + "\n");
  }

 private:
  const Globals& g_;
  std::string command_;
  std::string run_id_;
  fs::path manifest_;
  std::vector<std::string> artifacts_;
};

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// ---- synth ----------------------------------------------------------------

int cmd_synth(const Globals& g) {
  chase::skel::SynthConfig cfg = chase::skel::SynthConfig::defaults();
  json raw = json::object();
  if (!g.config.empty()) {
    raw = read_json(g.config);
    from_json(raw, cfg);
  }
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  Run run(g, "synth", "synth");
  const auto splits = chase::skel::synth_generate(cfg);
  const fs::path train = fs::path(g.out) / "train.chsk";
  const fs::path test = fs::path(g.out) / "test.chsk";
  chase::skel::save_dataset(train.string(), splits.train);
  chase::skel::save_dataset(test.string(), splits.test);
  run.add_artifact(train);
  run.add_artifact(chase::skel::manifest_path(train.string()));
  run.add_artifact(test);
  run.add_artifact(chase::skel::manifest_path(test.string()));
  json echo;
  to_json(echo, cfg);
  run.finish(echo, cfg.seed);
  if (!g.quiet) {
    std::cout << "train=" << train.string() << " samples=" << splits.train.size() << "\n"
              << "test=" << test.string() << " samples=" << splits.test.size() << "\n";
  }
  return kOk;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string train_data;
  std::string test_data;
  std::string run_id;
  std::string resume;
  std::string normalizer;
  std::optional<chase::Index> epochs;
  std::optional<double> lambda;
  std::optional<chase::Index> checkpoint_every;
};

struct RunConfig {
  chase::train::TrainConfig train;
  std::string train_data;
  std::string test_data;
  chase::Index checkpoint_every = 0;
  std::string run_id;
};

// CLI-level keys live next to the training keys in one flat object.
RunConfig split_config(json j) {
  RunConfig rc;
  auto take = [&](const char* key, auto& dst) {
    if (j.contains(key)) {
      try {
        j.at(key).get_to(dst);
      } catch (const json::exception&) {
        throw chase::ConfigError(std::string(key) + ": wrong type");
      }
      j.erase(key);
    }
  };
  take("train_data", rc.train_data);
  take("test_data", rc.test_data);
  take("checkpoint_every", rc.checkpoint_every);
  take("run_id", rc.run_id);
  from_json(j, rc.train);
  return rc;
}

int cmd_train(const Globals& g, const TrainArgs& a) {
  std::optional<chase::train::Checkpoint> resume;
  if (!a.resume.empty()) resume = chase::train::load_checkpoint(a.resume);

  RunConfig rc;
  if (!g.config.empty()) rc = split_config(read_json(g.config));
  else if (resume) rc = split_config(resume->config);
  if (!a.train_data.empty()) rc.train_data = a.train_data;
  if (!a.test_data.empty()) rc.test_data = a.test_data;
  if (!a.run_id.empty()) rc.run_id = a.run_id;
  if (!a.normalizer.empty()) rc.train.normalizer = chase::train::parse_normalizer(a.normalizer);
  if (a.epochs) rc.train.epochs = *a.epochs;
  if (a.lambda) rc.train.lambda = *a.lambda;
  if (a.checkpoint_every) rc.checkpoint_every = *a.checkpoint_every;
  if (g.seed) rc.train.seed = *g.seed;
  rc.train.validate();
  if (rc.checkpoint_every < 0) throw chase::ConfigError("checkpoint_every: must be non-negative");
  if (rc.train_data.empty()) throw chase::ConfigError("train_data: no training set given (--train-data)");
  if (rc.run_id.empty()) {
    rc.run_id = "train-" + chase::train::to_string(rc.train.normalizer) + "-seed" + std::to_string(rc.train.seed);
  }

  const chase::skel::Dataset train_set = chase::skel::load_dataset(rc.train_data);
  std::optional<chase::skel::Dataset> test_set;
  if (!rc.test_data.empty()) test_set = chase::skel::load_dataset(rc.test_data);

  Run run(g, "train", rc.run_id);
  chase::train::Trainer trainer(rc.train, train_set, test_set ? &*test_set : nullptr);
  if (resume) trainer.restore(*resume);

  const fs::path log_path = run.path(".log.jsonl");
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw std::runtime_error("cannot write " + log_path.string());
  while (!trainer.done()) {
    const auto entry = trainer.run_epoch();
    const std::string line = to_json(entry).dump();
    log << line << '\n';
    log.flush();
    if (!g.quiet) std::cout << line << "\n";
    if (rc.checkpoint_every > 0 && trainer.epoch() % rc.checkpoint_every == 0 && !trainer.done()) {
      chase::train::save_checkpoint(run.path(".epoch" + std::to_string(trainer.epoch()) + ".chck").string(),
                                    trainer.checkpoint());
    }
  }
  chase::train::save_checkpoint(run.path(".chck").string(), trainer.checkpoint());

  const chase::skel::Dataset& final_set = test_set ? *test_set : train_set;
  const double acc = chase::train::evaluate(trainer.model(), final_set);
  json echo = rc.train;
  echo["train_data"] = rc.train_data;
  echo["test_data"] = rc.test_data;
  echo["checkpoint_every"] = rc.checkpoint_every;
  echo["resumed_from"] = a.resume;
  run.finish(echo, rc.train.seed);
  std::cout << "final_acc=" << format_double(acc) << "\n";
  return kOk;
}

// ---- model loading (eval, discrepancy) --------------------------------------

chase::train::Model load_model(const std::string& ckpt_path, const chase::skel::Dataset& data) {
  const auto ckpt = chase::train::load_checkpoint(ckpt_path);
  chase::train::TrainConfig cfg;
  from_json(ckpt.config, cfg);
  auto model = chase::train::Model::init(cfg, data.sample_shape());
  model.load_state(ckpt);
  return model;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string run_id = "eval";
  double noise_sigma = 0.0;
  double mask_prob = 0.0;
  bool table = false;
  int table_seeds = 3;
};

int cmd_eval(const Globals& g, const EvalArgs& a) {
  if (a.table_seeds < 1) throw chase::ConfigError("--table-seeds must be >= 1");
  const auto data = chase::skel::load_dataset(a.data);
  auto model = load_model(a.checkpoint, data);
  Run run(g, "eval", a.run_id);
  const std::uint64_t seed = g.seed.value_or(0);

  json result;
  result["normalizer"] = chase::train::to_string(model.normalizer());
  result["clean_acc"] = chase::train::evaluate(model, data);
  chase::skel::CorruptionConfig single{a.noise_sigma, a.mask_prob, seed};
  result["acc"] = chase::train::evaluate(model, data, single);
  std::cout << "acc=" << format_double(result["acc"].get<double>()) << "\n";

  if (a.table) {
    // Noise-only and mask-only levels, mean and std over corruption seeds.
    struct Cell {
      const char* kind;
      double level;
    };
    const Cell cells[] = {{"noise", 1e-3}, {"noise", 1e-2}, {"mask", 1e-2}, {"mask", 1e-1}};
    json rows = json::array();
    std::string csv = "kind,level,mean,std\n";
    for (const auto& c : cells) {
      std::vector<double> accs;
      for (int s = 0; s < a.table_seeds; ++s) {
        chase::skel::CorruptionConfig cc;
        cc.seed = seed + static_cast<std::uint64_t>(s);
        (std::string(c.kind) == "noise" ? cc.noise_sigma : cc.mask_prob) = c.level;
        accs.push_back(chase::train::evaluate(model, data, cc));
      }
      double mean = 0.0, var = 0.0;
      for (double v : accs) mean += v / static_cast<double>(accs.size());
      for (double v : accs) var += (v - mean) * (v - mean);
      const double sd = accs.size() > 1 ? std::sqrt(var / static_cast<double>(accs.size() - 1)) : 0.0;
      rows.push_back({{"kind", c.kind}, {"level", c.level}, {"mean", mean}, {"std", sd}});
      csv += std::string(c.kind) + "," + format_double(c.level) + "," + format_double(mean) + "," + format_double(sd) + "\n";
      std::cout << "corruption kind=" << c.kind << " level=" << c.level << " acc_mean=" << format_double(mean)
                << " acc_std=" << format_double(sd) << "\n";
    }
    result["table"] = rows;
    write_text(run.path(".corruption.csv"), csv);
  }
  write_text(run.path(".eval.json"), result.dump(2) + "\n");
  run.finish({{"checkpoint", a.checkpoint}, {"data", a.data}, {"noise_sigma", a.noise_sigma},
              {"mask_prob", a.mask_prob}, {"table", a.table}, {"table_seeds", a.table_seeds}},
             seed);
  return kOk;
}

// ---- discrepancy --------------------------------------------------------------

struct DiscArgs {
  std::string data;
  std::string normalizer = "vanilla";
  std::string checkpoint;
  std::string run_id;
  chase::Index repetitions = 30;
  chase::Index points = 512;
};

int cmd_discrepancy(const Globals& g, const DiscArgs& a) {
  using chase::train::Normalizer;
  const Normalizer norm = chase::train::parse_normalizer(a.normalizer);
  if (a.checkpoint.empty() && (norm == Normalizer::chase || norm == Normalizer::batchnorm)) {
    throw chase::UsageError("--checkpoint is required for normalizer " + a.normalizer);
  }
  const auto data = chase::skel::load_dataset(a.data);
  chase::disc::ReportConfig cfg;
  cfg.repetitions = a.repetitions;
  cfg.points_per_entity = a.points;
  cfg.seed = g.seed.value_or(0);
  cfg.normalizer = a.normalizer;

  std::optional<chase::train::Model> model;
  chase::disc::SampleTransform transform;
  if (!a.checkpoint.empty()) {
    model = load_model(a.checkpoint, data);
    if (model->normalizer() != norm) {
      throw chase::UsageError("checkpoint was trained with normalizer " + chase::train::to_string(model->normalizer()));
    }
    transform = [&](const chase::skel::SkeletonSequence& s) { return model->normalize_eval(s); };
  } else if (norm == Normalizer::s2com) {
    transform = chase::skel::s2com_per_entity;
  } else if (norm == Normalizer::s2com_global) {
    transform = chase::skel::s2com_global;
  } else if (norm == Normalizer::s2com_global_std) {
    transform = chase::skel::std_scale;
  }
  const std::string run_id = a.run_id.empty() ? "discrepancy-" + a.normalizer : a.run_id;
  Run run(g, "discrepancy", run_id);
  const auto rep = chase::disc::report(data, transform, cfg);
  chase::disc::write_report(g.out, run_id, rep);
  run.add_artifact(fs::path(g.out) / (run_id + ".discrepancy.csv"));
  run.add_artifact(fs::path(g.out) / (run_id + ".discrepancy.json"));
  run.finish({{"data", a.data},
              {"normalizer", a.normalizer},
              {"checkpoint", a.checkpoint},
              {"repetitions", a.repetitions},
              {"points_per_entity", a.points}},
             cfg.seed);
  if (!g.quiet) {
    for (const auto& p : rep.pairs) {
      std::cout << "pair=" << p.pair.i << "-" << p.pair.j << " avg_kld=" << format_double(p.avg_kld.mean)
                << " jsd=" << format_double(p.jsd.mean) << " bd=" << format_double(p.bd.mean)
                << " hd=" << format_double(p.hd.mean) << " mmd=" << format_double(p.mmd.mean) << "\n";
    }
  }
  return kOk;
}

// ---- gradcheck ------------------------------------------------------------------

struct GradArgs {
  double eps = 1e-5;
  double tol = 1e-4;
  std::string fault;
  bool list = false;
};

int cmd_gradcheck(const Globals& g, const GradArgs& a) {
  if (a.list) {
    for (const auto& n : chase::train::gradcheck_names()) std::cout << n << "\n";
    return kOk;
  }
  chase::train::GradcheckOptions opts;
  opts.eps = a.eps;
  opts.tol = a.tol;
  opts.fault = a.fault;
  opts.seed = g.seed.value_or(0);
  if (!(opts.tol > 0.0)) throw chase::ConfigError("--tol must be positive");
  const auto entries = chase::train::run_gradcheck_suite(opts);
  int failed = 0;
  for (const auto& e : entries) {
    if (!e.report.passed) ++failed;
    if (!g.quiet || !e.report.passed) {
      std::cout << (e.report.passed ? "PASS " : "FAIL ") << e.name << " max_rel=" << e.report.max_rel_error
                << " max_abs=" << e.report.max_abs_error << "\n";
    }
  }
  std::cout << "gradcheck: " << entries.size() - static_cast<std::size_t>(failed) << "/" << entries.size()
            << " passed (eps=" << opts.eps << ", tol=" << opts.tol << ")\n";
  return failed ? kCheckFailed : kOk;
}

// ---- params ---------------------------------------------------------------------

struct ParamArgs {
  chase::Index c = 3, t = 64, j = 25, e = 2, c1 = 64, c2 = 8;
  std::vector<chase::Index> seg{1, 1, 1};
};

int cmd_params(const ParamArgs& a) {
  if (a.seg.size() != 3) throw chase::ConfigError("--seg expects three values t j e");
  const chase::shift::SequenceDims dims{a.c, a.t, a.j, a.e};
  const chase::SegmentSpec seg{a.seg[0], a.seg[1], a.seg[2]};
  const auto params = chase::shift::param_count(dims, a.c1, a.c2, seg);
  const auto flops = chase::shift::flop_count(dims, a.c1, a.c2, seg);
  std::cout << "params=" << params << "\n";
  std::cout << "flops=" << flops.total << " convention=" << flops.convention << "\n";
  return kOk;
}

int threads_from_env() {
  const char* v = std::getenv("CHASE_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw chase::ConfigError("CHASE_THREADS must be a positive integer, got '" + std::string(v) + "'");
  return static_cast<int>(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chase: learned origin shift and tooling for multi-entity skeleton clips"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Random seed (overrides config files)");
  app.add_option("--out", g.out, "Output directory (created if missing)");
  app.add_option("--config", g.config, "JSON config file");
  app.add_flag("--quiet", g.quiet, "Suppress progress output");
  app.add_flag("--overwrite", g.overwrite, "Replace an existing run with the same id");

  auto* synth = app.add_subcommand("synth", "Generate the synthetic multi-entity dataset");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a backbone with the chosen normaliser");
  train->add_option("--train-data", ta.train_data, "Training .chsk file");
  train->add_option("--test-data", ta.test_data, "Evaluation .chsk file");
  train->add_option("--run-id", ta.run_id, "Run identifier (file prefix)");
  train->add_option("--resume", ta.resume, "Checkpoint to resume from");
  train->add_option("--normalizer", ta.normalizer, "vanilla|s2com|s2com_global|s2com_global_std|batchnorm|aug|er|chase");
  train->add_option("--epochs", ta.epochs, "Epoch budget");
  train->add_option("--lambda", ta.lambda, "MPMMD weight");
  train->add_option("--checkpoint-every", ta.checkpoint_every, "Write a checkpoint every k epochs");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Top-1 accuracy of a checkpoint, optionally under corruption");
  eval->add_option("--checkpoint", ea.checkpoint, "Checkpoint file")->required();
  eval->add_option("--data", ea.data, "Dataset .chsk file")->required();
  eval->add_option("--run-id", ea.run_id, "Run identifier");
  eval->add_option("--noise-sigma", ea.noise_sigma, "Gaussian coordinate noise");
  eval->add_option("--mask-prob", ea.mask_prob, "Joint masking probability");
  eval->add_flag("--corruption-table", ea.table, "Noise 1e-3/1e-2 and mask 1e-2/1e-1 accuracy table");
  eval->add_option("--table-seeds", ea.table_seeds, "Corruption seeds per table cell");

  DiscArgs da;
  auto* disc = app.add_subcommand("discrepancy", "Inter-entity distribution discrepancy report");
  disc->add_option("--data", da.data, "Dataset .chsk file")->required();
  disc->add_option("--normalizer", da.normalizer, "Normaliser applied before measuring");
  disc->add_option("--checkpoint", da.checkpoint, "Trained checkpoint (required for chase, batchnorm)");
  disc->add_option("--run-id", da.run_id, "Run identifier");
  disc->add_option("--repetitions", da.repetitions, "Point-sampling repetitions");
  disc->add_option("--points", da.points, "Points per entity per repetition");

  GradArgs ga;
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of every differentiable op");
  grad->add_option("--eps", ga.eps, "Central-difference step");
  grad->add_option("--tol", ga.tol, "Relative tolerance");
  grad->add_option("--fault", ga.fault, "Test fixture: break the backward rule of the named check");
  grad->add_flag("--list", ga.list, "List check names");

  ParamArgs pa;
  auto* params = app.add_subcommand("params", "CLB parameter count and FLOP estimate");
  params->add_option("--c", pa.c, "Channels");
  params->add_option("--t", pa.t, "Frames");
  params->add_option("--j", pa.j, "Joints");
  params->add_option("--e", pa.e, "Entities");
  params->add_option("--c1", pa.c1, "First CLB width");
  params->add_option("--c2", pa.c2, "Second CLB width");
  params->add_option("--seg", pa.seg, "Segments t j e")->expected(3);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    g.threads = threads_from_env();
    Eigen::setNbThreads(g.threads);
    if (synth->parsed()) return cmd_synth(g);
    if (train->parsed()) return cmd_train(g, ta);
    if (eval->parsed()) return cmd_eval(g, ea);
    if (disc->parsed()) return cmd_discrepancy(g, da);
    if (grad->parsed()) return cmd_gradcheck(g, ga);
    if (params->parsed()) return cmd_params(pa);
  } catch (const chase::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const chase::skel::ValidationError& e) {
    std::cerr << "invalid input:\n";
    for (const auto& issue : e.issues()) std::cerr << "  " << issue << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
