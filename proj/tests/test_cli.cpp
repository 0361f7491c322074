#include <doctest.h>

#include <json.hpp>

#include "support.hpp"

using testing::run_cli;
using testing::scrape;
using testing::slurp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Small synthetic split plus a fast training config, shared by the tests below.
struct Fixture {
  testing::TempDir dir;
  std::string data;
  std::string train_cfg;

  Fixture() {
    data = (dir.path() / "data").string();
    testing::write_file(dir.path() / "synth.json", R"({"train_per_class": 24, "test_per_class": 12, "seed": 1})");
    const auto r = run_cli("--quiet --out '" + data + "' --config '" + dir.file("synth.json") + "' synth");
    REQUIRE(r.exit_code == 0);
    train_cfg = dir.file("train.json");
    testing::write_file(train_cfg, json{{"epochs", 3},
                                        {"batch_size", 16},
                                        {"lr_decay_epochs", {2}},
                                        {"backbone", {{"hidden_widths", {16}}, {"feature_dim", 8}}},
                                        {"clb", {{"c1", 8}, {"c2", 3}}},
                                        {"points_per_entity", 32},
                                        {"train_data", data + "/train.chsk"},
                                        {"test_data", data + "/test.chsk"}}
                                       .dump());
  }

  testing::CliResult train(const std::string& norm, const std::string& run_id, const std::string& extra = "") {
    return run_cli("--quiet --out '" + dir.file("runs") + "' --config '" + train_cfg + "' train --normalizer " + norm +
                   " --run-id " + run_id + " " + extra);
  }
  fs::path runs(const std::string& name) const { return dir.path() / "runs" / name; }
};

std::vector<json> read_log(const fs::path& p) {
  std::vector<json> out;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) out.push_back(json::parse(line));
  return out;
}

}  // namespace

TEST_CASE("params") {
  auto r = run_cli("params --c 3 --t 64 --j 25 --e 2 --c1 64 --c2 8");
  CHECK(r.exit_code == 0);
  CHECK(r.contains("params=26368\n"));
  CHECK(r.contains("convention=MAC2"));
  r = run_cli("params --c 1 --t 1 --j 1 --e 1 --c1 1 --c2 1");
  CHECK(r.contains("params=4\n"));
  CHECK(run_cli("params --c 0").exit_code == 2);
  CHECK(run_cli("params --t 64 --seg 3 1 1").exit_code == 2);
  CHECK(run_cli("params --c1 banana").exit_code == 2);
}

TEST_CASE("gradcheck") {
  auto r = run_cli("gradcheck");
  CHECK(r.exit_code == 0);
  CHECK(r.contains("FAIL") == false);
  CHECK(r.contains("PASS total_loss[x]"));

  r = run_cli("--quiet gradcheck --fault softmax");
  CHECK(r.exit_code == 1);
  CHECK(r.contains("FAIL softmax"));

  r = run_cli("--quiet gradcheck --eps 1e-6");
  CHECK(r.exit_code == 0);
  CHECK(r.contains("eps=1e-06"));

  CHECK(run_cli("gradcheck --fault no_such_op").exit_code == 2);
  CHECK(run_cli("gradcheck --list").contains("chase_forward[x]"));
}

TEST_CASE("global contract") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("params", "CHASE_THREADS=abc").exit_code == 2);
  CHECK(run_cli("params", "CHASE_THREADS=2").exit_code == 0);
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("synth") {
  testing::TempDir dir;
  testing::write_file(dir.path() / "cfg.json", R"({"train_per_class": 10, "test_per_class": 5})");
  const std::string cfg = " --config '" + dir.file("cfg.json") + "'";
  const fs::path a = dir.path() / "nested" / "a", b = dir.path() / "b";
  auto r = run_cli("--seed 7 --out '" + a.string() + "'" + cfg + " synth");
  REQUIRE(r.exit_code == 0);
  CHECK(r.contains("samples=40"));
  CHECK(run_cli("--quiet --seed 7 --out '" + b.string() + "'" + cfg + " synth").exit_code == 0);
  CHECK(slurp(a / "train.chsk") == slurp(b / "train.chsk"));
  CHECK(slurp(a / "test.chsk") == slurp(b / "test.chsk"));
  const auto manifest = json::parse(slurp(a / "synth.manifest.json"));
  CHECK(manifest["command"] == "synth");
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["artifacts"].size() == 4);

  // A second run into the same directory is refused unless asked for.
  CHECK(run_cli("--quiet --seed 7 --out '" + a.string() + "'" + cfg + " synth").exit_code == 2);
  CHECK(run_cli("--quiet --overwrite --seed 7 --out '" + a.string() + "'" + cfg + " synth").exit_code == 0);

  testing::write_file(dir.path() / "bad.json", R"({"num_classes": 0})");
  r = run_cli("--out '" + dir.file("c") + "' --config '" + dir.file("bad.json") + "' synth");
  CHECK(r.exit_code == 2);
  CHECK(r.contains("synth.num_classes"));
}

TEST_CASE("train, eval and discrepancy") {
  Fixture fx;

  SUBCASE("chase logs the mpmmd term, vanilla does not") {
    auto r = fx.train("chase", "c");
    REQUIRE(r.exit_code == 0);
    CHECK(r.contains("final_acc="));
    const double acc = scrape(r.output, "final_acc");
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    const auto log = read_log(fx.runs("c.log.jsonl"));
    REQUIRE(log.size() == 3);
    for (const auto& e : log) {
      CHECK(e.contains("mpmmd"));
      CHECK(e.contains("eval_acc"));
      CHECK(e.contains("train_loss"));
      CHECK(e.contains("cls_loss"));
    }
    CHECK(fs::exists(fx.runs("c.chck")));
    const auto manifest = json::parse(slurp(fx.runs("c.manifest.json")));
    CHECK(manifest["config"]["normalizer"] == "chase");

    r = fx.train("vanilla", "v");
    REQUIRE(r.exit_code == 0);
    for (const auto& e : read_log(fx.runs("v.log.jsonl"))) CHECK_FALSE(e.contains("mpmmd"));

    // Same run id again is refused.
    CHECK(fx.train("vanilla", "v").exit_code == 2);
  }

  SUBCASE("identical runs and resumed runs agree") {
    REQUIRE(fx.train("chase", "a", "--checkpoint-every 1").exit_code == 0);
    REQUIRE(fx.train("chase", "b").exit_code == 0);
    CHECK(slurp(fx.runs("a.log.jsonl")) == slurp(fx.runs("b.log.jsonl")));
    CHECK(slurp(fx.runs("a.chck")) == slurp(fx.runs("b.chck")));
    REQUIRE(fs::exists(fx.runs("a.epoch1.chck")));

    const auto r = run_cli("--quiet --out '" + fx.dir.file("runs") + "' train --resume '" +
                           fx.runs("a.epoch1.chck").string() + "' --run-id r --train-data '" + fx.data +
                           "/train.chsk' --test-data '" + fx.data + "/test.chsk'");
    REQUIRE(r.exit_code == 0);
    const auto full = read_log(fx.runs("a.log.jsonl")), tail = read_log(fx.runs("r.log.jsonl"));
    REQUIRE(tail.size() == 2);
    CHECK(tail[0] == full[1]);
    CHECK(tail[1] == full[2]);
    CHECK(slurp(fx.runs("r.chck")) == slurp(fx.runs("a.chck")));
  }

  SUBCASE("errors") {
    auto r = run_cli("--out '" + fx.dir.file("runs") + "' train --train-data '" + fx.dir.file("missing.chsk") + "'");
    CHECK(r.exit_code == 2);
    r = fx.train("chase", "x", "--lambda -1");
    CHECK(r.exit_code == 2);
    CHECK(r.contains("lambda"));
    testing::write_file(fx.dir.path() / "hot.json",
                        json{{"lr", 1e200}, {"epochs", 2}, {"train_data", fx.data + "/train.chsk"}}.dump());
    r = run_cli("--quiet --out '" + fx.dir.file("runs") + "' --config '" + fx.dir.file("hot.json") +
                "' train --normalizer vanilla --run-id hot");
    CHECK(r.exit_code == 3);
    CHECK(r.contains("epoch "));
  }

  SUBCASE("eval and the corruption table") {
    REQUIRE(fx.train("s2com_global", "g").exit_code == 0);
    const std::string base = "--quiet --out '" + fx.dir.file("eval") + "' eval --checkpoint '" +
                             fx.runs("g.chck").string() + "' --data '" + fx.data + "/test.chsk'";
    auto r = run_cli(base + " --run-id clean");
    REQUIRE(r.exit_code == 0);
    const auto clean = json::parse(slurp(fx.dir.path() / "eval" / "clean.eval.json"));
    CHECK(clean["acc"] == clean["clean_acc"]);
    CHECK(scrape(r.output, "acc") == clean["acc"].get<double>());

    r = run_cli(base + " --run-id table --corruption-table --table-seeds 2");
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(fx.dir.path() / "eval" / "table.corruption.csv");
    CHECK(csv.rfind("kind,level,mean,std\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(csv.find("noise,0.001,") != std::string::npos);
    CHECK(csv.find("mask,0.10000000000000001,") != std::string::npos);

    CHECK(run_cli(base + " --run-id bad --mask-prob 2").exit_code == 2);
  }

  SUBCASE("discrepancy") {
    const std::string out = " --quiet --out '" + fx.dir.file("disc") + "'";
    auto r = run_cli(out + " discrepancy --data '" + fx.data + "/test.chsk' --repetitions 5 --points 64");
    REQUIRE(r.exit_code == 0);
    const auto rep = json::parse(slurp(fx.dir.path() / "disc" / "discrepancy-vanilla.discrepancy.json"));
    CHECK(rep["repetitions"] == 5);
    const auto& pair = rep["pairs"][0];
    for (const char* m : {"avg_kld", "jsd", "bd", "hd", "mmd"}) {
      CHECK(pair[m]["mean"].get<double>() > 0.0);
      CHECK(pair[m]["std"].get<double>() >= 0.0);
    }
    CHECK(fs::exists(fx.dir.path() / "disc" / "discrepancy-vanilla.discrepancy.csv"));

    CHECK(run_cli(out + " discrepancy --data '" + fx.data + "/test.chsk' --normalizer chase").exit_code == 2);

    REQUIRE(fx.train("chase", "c").exit_code == 0);
    r = run_cli(out + " discrepancy --data '" + fx.data + "/test.chsk' --normalizer chase --checkpoint '" +
                fx.runs("c.chck").string() + "' --repetitions 3 --points 64");
    CHECK(r.exit_code == 0);
    // A checkpoint trained with another normaliser is refused.
    r = run_cli(out + " discrepancy --data '" + fx.data + "/test.chsk' --normalizer s2com --run-id mism --checkpoint '" +
                fx.runs("c.chck").string() + "'");
    CHECK(r.exit_code == 2);
  }
}
