#pragma once

// File-driven experiment pipeline: generate -> soup -> analyze -> mds -> report.
//
// Output root layout:
//   config.json                          effective config with its hash
//   run.log                              timestamped progress (the only file with timestamps)
//   bundles/trial<T>_env<E>/             one population per trial x held-out environment
//   trajectories/trial<T>_env<E>/<algo>.json
//   analysis/                            series, quantiles, distance bins, analysis.json
//   mds/trial<T>_env<E>/<algo>_<distance>_<kind>.{csv,json}
//   report/<family>_<env>_<t>.svg

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "soup/analysis.hpp"
#include "soup/mds.hpp"
#include "soup/soup_algos.hpp"
#include "soup/synth.hpp"
#include "soup/viz.hpp"

namespace soup {

struct MdsSelection {
  int trial = 0;
  int environment = 0;
  std::vector<Algorithm> algorithms{Algorithm::Greedier};
  std::vector<DistanceKind> distances{DistanceKind::Euclidean, DistanceKind::Diversity};
  std::vector<MdsKind> kinds{MdsKind::Metric, MdsKind::NonMetric};
  int max_iters = 300;
  int restarts = 4;
};

struct RunConfig {
  std::uint64_t seed = 1;
  int trials = 10;
  int environments = 4;  // held-out environments per trial, domains 0 .. environments - 1
  std::size_t models = 20;
  std::vector<Algorithm> algorithms{std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
  std::optional<Acceptance> accept;  // unset: each algorithm's default
  DomainSpec domains;
  MlpSpec mlp;
  FinetuneConfig finetune;
  MdsSelection mds;

  Acceptance acceptance_for(Algorithm a) const { return accept.value_or(default_acceptance(a)); }
  // Throws DataError on an inconsistent config.
  void validate() const;
};

json to_json(const RunConfig& c);
// Missing keys take their defaults; unknown keys are rejected. Throws
// DataError.
RunConfig run_config_from_json(const json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// FNV-1a 64 over the canonical (sorted-key, compact) JSON, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);
std::string config_hash(const RunConfig& c);

std::string run_label(int trial, int environment);
MdsKind parse_mds_kind(const std::string& name);

struct Layout {
  std::filesystem::path root;

  std::filesystem::path config() const { return root / "config.json"; }
  std::filesystem::path log() const { return root / "run.log"; }
  std::filesystem::path bundle(int trial, int env) const { return root / "bundles" / run_label(trial, env); }
  std::filesystem::path trajectories(int trial, int env) const { return root / "trajectories" / run_label(trial, env); }
  std::filesystem::path trajectory(int trial, int env, Algorithm a) const {
    return trajectories(trial, env) / (std::string(algorithm_name(a)) + ".json");
  }
  std::filesystem::path analysis() const { return root / "analysis"; }
  std::filesystem::path mds(int trial, int env) const { return root / "mds" / run_label(trial, env); }
  std::filesystem::path report() const { return root / "report"; }
};

// Appends "<UTC timestamp> <message>" to run.log.
void log_event(const Layout& out, const std::string& message);

// Writes config.json; returns the hash.
std::string write_config(const RunConfig& c, const Layout& out);

std::vector<std::filesystem::path> cmd_generate(const RunConfig& c, const Layout& out, int jobs);
std::vector<std::filesystem::path> cmd_soup(const RunConfig& c, const Layout& out, int jobs);
AnalysisReport cmd_analyze(const RunConfig& c, const Layout& out);
std::vector<std::filesystem::path> cmd_mds(const RunConfig& c, const Layout& out, int jobs);
std::vector<std::filesystem::path> cmd_report(const RunConfig& c, const Layout& out, int jobs);
// Verifier messages, prefixed with the trajectory file; empty when clean.
std::vector<std::string> cmd_verify(const RunConfig& c, const Layout& out);

// Every model, accepted WA and evaluated candidate WA of one trajectory.
struct ScenePoints {
  std::vector<std::string> ids;
  std::vector<std::string> roles;  // model, wa, candidate-wa
  std::vector<WeightVector> weights;
  std::vector<BitVector> id_val_correct;
  std::vector<double> accuracy;  // ID validation
  std::vector<int> ingredient_count;
};

// Candidate WA correctness is recomputed with the evaluator.
ScenePoints collect_scene_points(const Bundle& bundle, const SoupTrajectory& t, const Evaluator& evaluator);

// Ingredient count encoded in a point id (m<id>: 1, wa<k>: k, c<t>_<id>: t + 1).
int ingredient_count_of(const std::string& id);

SoupTrajectory load_trajectory(const std::filesystem::path& path);

}  // namespace soup
