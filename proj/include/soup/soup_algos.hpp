#pragma once

// Ingredient-selection algorithms for weight-ensembles.
//
// All three start from the model with the highest ID-validation accuracy
// (ties: lowest id) and only ever consult ID-validation accuracy when
// deciding; OOD accuracy is recorded for analysis.
//
//   greedy    one pass in decreasing individual accuracy; a rejected
//             candidate is discarded for good.
//   greedier  each step evaluates every remaining candidate and takes the
//             best one if it passes the acceptance rule.
//   ranked    each step walks the remaining candidates by decreasing
//             distance from the current weight-average and takes the first
//             that passes; rejected candidates stay in the pool.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "soup/evaluator.hpp"
#include "soup/metrics.hpp"
#include "soup/model_store.hpp"

namespace soup {

enum class Algorithm { Greedy, Greedier, RankedDiversity, RankedEuclidean };
enum class Acceptance { Strict, NonStrict };

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);
inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::Greedy, Algorithm::Greedier,
                                               Algorithm::RankedDiversity, Algorithm::RankedEuclidean};

const char* acceptance_name(Acceptance a);
Acceptance parse_acceptance(const std::string& name);

// greedy: non-strict; greedier and ranked: strict.
Acceptance default_acceptance(Algorithm a);

inline bool passes(Acceptance rule, double candidate, double current) {
  return rule == Acceptance::Strict ? candidate > current : candidate >= current;
}

// Distances of one candidate model from the current weight-average.
struct CandidateDistance {
  int id = 0;
  double diversity = 0.0;  // ratio-error on ID validation; may be +inf
  double euclidean = 0.0;  // squared L2 in weight space

  double of(DistanceKind kind) const { return kind == DistanceKind::Diversity ? diversity : euclidean; }
  friend bool operator==(const CandidateDistance&, const CandidateDistance&) = default;
};

struct CandidateEval {
  int candidate_id = 0;
  double wa_id_val_accuracy = 0.0;
  double wa_ood_accuracy = 0.0;
  double diversity = 0.0;
  double euclidean = 0.0;
  bool passed = false;

  friend bool operator==(const CandidateEval&, const CandidateEval&) = default;
};

struct WaState {
  std::vector<int> ingredients;  // in order of acceptance
  double id_val_accuracy = 0.0;
  double ood_accuracy = 0.0;
  BitVector id_val_correct;
  BitVector ood_correct;

  const BitVector& correct(Split s) const { return s == Split::IdVal ? id_val_correct : ood_correct; }
  double accuracy(Split s) const { return s == Split::IdVal ? id_val_accuracy : ood_accuracy; }
  friend bool operator==(const WaState&, const WaState&) = default;
};

struct Iteration {
  int t = 0;                             // selection step, from 1
  std::vector<int> remaining_before;     // pool at the start of the step, ascending id
  std::vector<CandidateDistance> pool;   // distances of every pooled model from the current WA
  std::vector<CandidateEval> evals;      // in evaluation order
  std::optional<int> selected_id;
  std::vector<int> discarded;            // greedy only: rejected for good during this step
  WaState wa_after;                      // equals the previous WA when nothing was selected

  friend bool operator==(const Iteration&, const Iteration&) = default;
};

struct SoupTrajectory {
  Algorithm algorithm = Algorithm::Greedier;
  Acceptance acceptance = Acceptance::Strict;
  int initial_model_id = 0;
  std::vector<int> model_ids;  // every model in the population
  WaState initial;
  std::vector<Iteration> iterations;
  int terminated_at = 0;  // t of the last iteration; 0 for initialization only
  std::string bundle;       // label of the source bundle
  std::string config_hash;

  const WaState& final_state() const { return iterations.empty() ? initial : iterations.back().wa_after; }
  // WA states indexed by ingredient count - 1 (initial first).
  std::vector<const WaState*> accepted_states() const;
  friend bool operator==(const SoupTrajectory&, const SoupTrajectory&) = default;
};

// Models sorted by decreasing ID-validation accuracy, ties by lower id.
std::vector<int> accuracy_order(const Bundle& bundle);

CandidateDistance candidate_distance(const WeightVector& wa_weights, const BitVector& wa_id_val,
                                     const ModelEntry& candidate);

// Forms the WA of ingredients + candidate and evaluates it; distances are
// measured from the WA of the ingredients alone. `passed` is left false.
CandidateEval evaluate_candidate(std::span<const ModelEntry* const> ingredients, const ModelEntry& candidate,
                                 const Evaluator& evaluator);

SoupTrajectory run_greedy(const Bundle& bundle, const Evaluator& evaluator,
                          Acceptance accept = Acceptance::NonStrict);
SoupTrajectory run_greedier(const Bundle& bundle, const Evaluator& evaluator,
                            Acceptance accept = Acceptance::Strict, int jobs = 1);
SoupTrajectory run_ranked(const Bundle& bundle, const Evaluator& evaluator, DistanceKind kind,
                          Acceptance accept = Acceptance::Strict);

SoupTrajectory run_algorithm(Algorithm algo, const Bundle& bundle, const Evaluator& evaluator,
                             Acceptance accept, int jobs = 1);

// Ranked walk order: decreasing distance, +inf first, ties by lower id.
std::vector<CandidateDistance> ranked_order(std::vector<CandidateDistance> pool, DistanceKind kind);

json to_json(const SoupTrajectory& t);
// Throws SchemaError on a version mismatch, DataError on malformed input.
SoupTrajectory trajectory_from_json(const json& j);

inline constexpr int kTrajectorySchemaVersion = 1;

// Checks the invariants every trajectory must satisfy from its log alone:
// monotone accuracy under its acceptance rule, single use of each model,
// conservation of the model set, greedier step-optimality, ranked walk
// order. Returns one message per violation (empty when clean).
std::vector<std::string> verify_trajectory(const SoupTrajectory& t);

}  // namespace soup
