#include "chase/disc/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "chase/core/random.hpp"
#include "chase/disc/divergence.hpp"
#include "chase/disc/mmd.hpp"

namespace chase::disc {

namespace {

MetricStats summarise(const std::vector<double>& v) {
  MetricStats s;
  const double n = static_cast<double>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

// Rows = (sample, t, j) positions of one entity.
std::vector<RowMatrix<double>> entity_clouds(const std::vector<skel::SkeletonSequence>& xs) {
  const auto& first = xs.front();
  const Index C = first.channels(), T = first.frames(), J = first.joints(), E = first.entities();
  std::vector<RowMatrix<double>> clouds(static_cast<std::size_t>(E),
                                        RowMatrix<double>(static_cast<Index>(xs.size()) * T * J, C));
  Index row = 0;
  for (const auto& x : xs) {
    for (Index t = 0; t < T; ++t)
      for (Index j = 0; j < J; ++j, ++row)
        for (Index e = 0; e < E; ++e)
          for (Index c = 0; c < C; ++c) clouds[static_cast<std::size_t>(e)](row, c) = x.coords({c, t, j, e});
  }
  return clouds;
}

RowMatrix<double> draw(const RowMatrix<double>& cloud, Index k, std::mt19937_64& rng) {
  if (cloud.rows() <= k) return cloud;
  std::vector<Index> all(static_cast<std::size_t>(cloud.rows()));
  std::iota(all.begin(), all.end(), Index{0});
  std::vector<Index> keep;
  std::sample(all.begin(), all.end(), std::back_inserter(keep), k, rng);
  RowMatrix<double> out(k, cloud.cols());
  for (Index i = 0; i < k; ++i) out.row(i) = cloud.row(keep[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

DiscrepancyReport report(const skel::Dataset& data, const SampleTransform& normalizer, const ReportConfig& cfg) {
  if (data.empty()) throw UsageError("report: dataset is empty");
  if (cfg.repetitions < 1) throw ConfigError("report: repetitions must be >= 1");
  if (cfg.points_per_entity < 2) throw ConfigError("report: points_per_entity must be >= 2");
  cfg.kde.validate();
  data.sample_shape();  // rejects ragged sets

  std::vector<skel::SkeletonSequence> xs;
  xs.reserve(data.size());
  for (const auto& s : data.samples) xs.push_back(normalizer ? normalizer(s) : s);
  const auto clouds = entity_clouds(xs);
  const auto pairs = shift::all_pairs(static_cast<Index>(clouds.size()));

  struct Series {
    std::vector<double> kld, js, b, h, m;
  };
  std::vector<Series> series(pairs.size());
  for (Index r = 0; r < cfg.repetitions; ++r) {
    auto rng = make_rng({cfg.seed, stream::report, static_cast<std::uint64_t>(r)});
    std::vector<RowMatrix<double>> drawn;
    for (const auto& c : clouds) drawn.push_back(draw(c, cfg.points_per_entity, rng));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto& a = drawn[static_cast<std::size_t>(pairs[p].i)];
      const auto& b = drawn[static_cast<std::size_t>(pairs[p].j)];
      const auto [pa, pb] = kde_pair(a, b, cfg.kde);
      auto& s = series[p];
      s.kld.push_back(avg_kld(pa, pb));
      s.js.push_back(jsd(pa, pb));
      s.b.push_back(bd(pa, pb));
      s.h.push_back(hd(pa, pb));
      TensorXd ta(Shape{a.rows(), a.cols()}), tb(Shape{b.rows(), b.cols()});
      ta.matrix() = a;
      tb.matrix() = b;
      const double m2 = mmd_sq(Value(ta), Value(tb)).item();
      s.m.push_back(std::sqrt(std::max(0.0, m2)));
    }
  }

  DiscrepancyReport out;
  out.normalizer = cfg.normalizer;
  out.repetitions = cfg.repetitions;
  out.points_per_entity = cfg.points_per_entity;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& s = series[p];
    out.pairs.push_back({pairs[p], summarise(s.kld), summarise(s.js), summarise(s.b), summarise(s.h), summarise(s.m)});
  }
  return out;
}

namespace {

std::string pair_name(const shift::EntityPair& p) { return std::to_string(p.i) + "-" + std::to_string(p.j); }

template <typename F>
void for_each_metric(const PairReport& p, F&& f) {
  f("avg_kld", p.avg_kld);
  f("jsd", p.jsd);
  f("bd", p.bd);
  f("hd", p.hd);
  f("mmd", p.mmd);
}

}  // namespace

nlohmann::json to_json(const DiscrepancyReport& r) {
  nlohmann::json j;
  j["normalizer"] = r.normalizer;
  j["repetitions"] = r.repetitions;
  j["points_per_entity"] = r.points_per_entity;
  j["pairs"] = nlohmann::json::array();
  for (const auto& p : r.pairs) {
    nlohmann::json row;
    row["pair"] = pair_name(p.pair);
    for_each_metric(p, [&](const char* name, const MetricStats& s) { row[name] = {{"mean", s.mean}, {"std", s.std}}; });
    j["pairs"].push_back(row);
  }
  return j;
}

std::string to_csv(const DiscrepancyReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "pair,metric,mean,std\n";
  for (const auto& p : r.pairs) {
    for_each_metric(p, [&](const char* name, const MetricStats& s) {
      os << pair_name(p.pair) << ',' << name << ',' << s.mean << ',' << s.std << '\n';
    });
  }
  return os.str();
}

void write_report(const std::string& dir, const std::string& run_id, const DiscrepancyReport& r) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base = fs::path(dir) / (run_id + ".discrepancy");
  std::ofstream csv(base.string() + ".csv");
  csv << to_csv(r);
  std::ofstream js(base.string() + ".json");
  js << to_json(r).dump(2) << '\n';
  if (!csv || !js) throw std::runtime_error("cannot write report files under " + dir);
}

}  // namespace chase::disc
