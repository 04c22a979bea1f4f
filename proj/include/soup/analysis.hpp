#pragma once

// Statistics over soup trajectories.
//
// A Run is one bundle (trial x held-out environment) with one trajectory per
// algorithm. Series are aggregated across runs: every per-run series is
// extended to the longest length by repeating its terminal value, then
// summarized per t as mean +- 1.96 sd / sqrt(n).

#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "soup/soup_algos.hpp"

namespace soup {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct Run {
  std::string label;
  int trial = 0;
  int environment = 0;
  std::map<int, CorrectnessRecord> models;  // correctness of every model in the bundle
  std::map<Algorithm, SoupTrajectory> trajectories;
};

Run make_run(const Bundle& bundle, std::vector<SoupTrajectory> trajectories);

struct Summary {
  double mean = kMissing;
  double half_width = kMissing;  // 1.96 sd / sqrt(n); 0 when n == 1
  std::size_t n = 0;              // values that entered the mean
  std::size_t missing = 0;        // NaN or infinite values left out

  double ci_lo() const { return mean - half_width; }
  double ci_hi() const { return mean + half_width; }
};

// Sample sd (n - 1 denominator). Non-finite values are counted as missing.
Summary summarize(const std::vector<double>& values);

struct Series {
  std::string algorithm;
  std::string statistic;
  std::vector<int> t;
  std::vector<std::vector<double>> values;  // [t][run]; NaN = missing
  std::vector<std::vector<bool>> carried;   // [t][run]: value repeated past the run's end
  std::vector<Summary> summary;             // [t]
};

struct SeriesBundle {
  std::vector<Series> series;
  int max_t = 0;

  const Series* find(const std::string& algorithm, const std::string& statistic) const;
};

// Extends each per-run series (first element at index t0) to the common
// length with its terminal value and summarizes. An empty run series is all
// missing.
Series aggregate(const std::string& algorithm, const std::string& statistic,
                 const std::vector<std::vector<double>>& runs, int t0);

// Element-wise other - benchmark after both are extended to the common length.
Series difference(const std::string& algorithm, const std::string& statistic,
                  const std::vector<std::vector<double>>& other, const std::vector<std::vector<double>>& benchmark,
                  int t0);

// WA accuracy on `split` indexed by ingredient count (1-based).
std::vector<double> accuracy_by_ingredients(const SoupTrajectory& t, Split split);

// Raw accuracy series ("accuracy/<split>") from 1 ingredient and differences
// against greedier ("accuracy_diff/<split>") from 2, for both splits.
// Throws DataError when the runs do not all carry the same algorithms or
// lack greedier.
SeriesBundle benchmark_difference_series(const std::vector<Run>& runs);

struct QuantileRecord {
  int t = 0;
  Algorithm algorithm = Algorithm::Greedier;
  DistanceKind kind = DistanceKind::Diversity;
  double quantile = 0.0;  // mid-rank / num_remaining, in (0, 1]
  double distance = 0.0;  // may be +inf for diversity
  std::size_t num_remaining = 0;
  std::size_t run = 0;
};

// Mid-rank of values[index] among values (ascending, 1 = smallest).
double mid_rank(const std::vector<double>& values, std::size_t index);

// One record per step with a selection. Greedy's candidate set is the pool
// minus the models it rejected earlier in the same step.
std::vector<QuantileRecord> selection_quantiles(const SoupTrajectory& t, DistanceKind kind, std::size_t run = 0);
std::vector<QuantileRecord> selection_quantile_series(const std::vector<Run>& runs, DistanceKind kind);

// Mean quantile over steps t <= max_t of one algorithm.
Summary mean_quantile(const std::vector<QuantileRecord>& records, Algorithm algo, int max_t);

// Quartiles by linear interpolation between order statistics
// (position (n - 1) p in the sorted sample). +inf sorts last.
double quantile_linear(const std::vector<double>& sorted, double p);

struct BoxStats {
  double q1 = 0, median = 0, q3 = 0;
  double whisker_lo = 0, whisker_hi = 0;  // most extreme values within 1.5 IQR of the box
  std::vector<double> outliers;
  std::size_t n = 0;
};

// Finite values only.
BoxStats box_stats(std::vector<double> values);

struct DistanceBin {
  int t = 0;
  Algorithm algorithm = Algorithm::Greedier;
  DistanceKind kind = DistanceKind::Diversity;
  std::vector<double> values;  // sorted, infinities last
  std::size_t infinite = 0;
  double mean_finite = kMissing;
  double q1 = kMissing, median = kMissing, q3 = kMissing;
};

// Raw selected distances binned by t = 1 .. longest run.
std::vector<DistanceBin> selection_distance_series(const std::vector<QuantileRecord>& records);

// Examples of one split partitioned by (WA at t correct?, ingredient correct?):
//   set 1  WA wrong, ingredient right   P(WA at t+1 right)
//   set 2  WA right, ingredient wrong   P(WA at t+1 wrong)
//   set 3  WA right, ingredient right   P(WA at t+1 right)
//   set 4  WA wrong, ingredient wrong   P(WA at t+1 wrong)
struct ErrorDynamicsStep {
  int t = 0;  // ingredients before the step
  int ingredient = 0;
  std::array<std::size_t, 4> sizes{};
  std::array<double, 4> probability{kMissing, kMissing, kMissing, kMissing};
};

ErrorDynamicsStep error_dynamics_step(const BitVector& wa_t, const BitVector& ingredient, const BitVector& wa_next);
std::vector<ErrorDynamicsStep> error_dynamics(const SoupTrajectory& t, const Run& run, Split split);

// "error_set<k>/<split>" and "error_set<k>_diff/<split>" per algorithm.
SeriesBundle error_dynamics_series(const std::vector<Run>& runs, Split split);

// APD of the ingredient set at each ingredient count >= 2.
std::vector<double> apd_by_ingredients(const SoupTrajectory& t, const Run& run, Split split);

struct ApdQuantile {
  int t = 0;
  double quantile = 0.0;
  std::size_t candidates = 0;
  std::size_t run = 0;
};

// Greedier only: quantile of the selected candidate set's APD among the APDs
// of every candidate set evaluated in that step.
std::vector<ApdQuantile> greedier_apd_quantiles(const SoupTrajectory& t, const Run& run, Split split,
                                                std::size_t run_index = 0);

// "apd/<split>" per algorithm, from 2 ingredients.
SeriesBundle apd_series(const std::vector<Run>& runs, Split split);

struct AnalysisReport {
  std::string config_hash;
  SeriesBundle series;
  std::map<DistanceKind, std::vector<QuantileRecord>> quantiles;
  std::map<DistanceKind, std::vector<DistanceBin>> distance_bins;
  std::vector<ApdQuantile> apd_quantiles;
  std::vector<std::string> notes;
};

AnalysisReport analyze(const std::vector<Run>& runs, const std::string& config_hash);

// series.csv, quantiles.csv, distance_bins.csv, apd_quantiles.csv and
// analysis.json under dir.
void write_report(const AnalysisReport& report, const std::filesystem::path& dir);
json to_json(const AnalysisReport& report);
// Inverse of to_json; distance bins are rebuilt from the quantile records.
// Throws SchemaError on a version mismatch.
AnalysisReport report_from_json(const json& j);

inline constexpr int kAnalysisSchemaVersion = 1;
void write_series_csv(const SeriesBundle& bundle, const std::string& config_hash, std::ostream& out);

}  // namespace soup
