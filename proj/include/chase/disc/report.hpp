#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chase/disc/kde.hpp"
#include "chase/shift/pairs.hpp"
#include "chase/skel/sequence.hpp"

namespace chase::disc {

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single repetition
};

struct PairReport {
  shift::EntityPair pair;
  MetricStats avg_kld, jsd, bd, hd, mmd;
};

struct DiscrepancyReport {
  std::string normalizer;
  Index repetitions = 0;
  Index points_per_entity = 0;
  std::vector<PairReport> pairs;
};

struct ReportConfig {
  KdeConfig kde;
  Index points_per_entity = 512;
  Index repetitions = 30;
  std::uint64_t seed = 0;
  std::string normalizer = "vanilla";
};

/// Maps one sequence to its normalised form; empty means identity.
using SampleTransform = std::function<skel::SkeletonSequence(const skel::SkeletonSequence&)>;

/// Applies the normaliser to every sample, then per repetition draws
/// points_per_entity points of each entity (pooled over samples, frames and
/// joints) and evaluates all five metrics for every entity pair. MMD is the
/// square root of the V-statistic with the median-heuristic bandwidth.
DiscrepancyReport report(const skel::Dataset& data, const SampleTransform& normalizer, const ReportConfig& cfg);

nlohmann::json to_json(const DiscrepancyReport& r);
/// Columns: pair, metric, mean, std.
std::string to_csv(const DiscrepancyReport& r);
/// Writes <dir>/<run_id>.discrepancy.csv and .json.
void write_report(const std::string& dir, const std::string& run_id, const DiscrepancyReport& r);

}  // namespace chase::disc
