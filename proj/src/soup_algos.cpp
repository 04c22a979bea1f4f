#include "soup/soup_algos.hpp"

#include <algorithm>
#include <stdexcept>

#include "soup/parallel.hpp"

namespace soup {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Greedy: return "greedy";
    case Algorithm::Greedier: return "greedier";
    case Algorithm::RankedDiversity: return "ranked-diversity";
    case Algorithm::RankedEuclidean: return "ranked-euclidean";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : kAllAlgorithms) {
    if (name == algorithm_name(a)) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

const char* acceptance_name(Acceptance a) { return a == Acceptance::Strict ? "strict" : "nonstrict"; }

Acceptance parse_acceptance(const std::string& name) {
  if (name == "strict") return Acceptance::Strict;
  if (name == "nonstrict") return Acceptance::NonStrict;
  throw std::invalid_argument("unknown acceptance rule '" + name + "'");
}

Acceptance default_acceptance(Algorithm a) {
  return a == Algorithm::Greedy ? Acceptance::NonStrict : Acceptance::Strict;
}

std::vector<const WaState*> SoupTrajectory::accepted_states() const {
  std::vector<const WaState*> out{&initial};
  for (const auto& it : iterations) {
    if (it.selected_id) out.push_back(&it.wa_after);
  }
  return out;
}

std::vector<int> accuracy_order(const Bundle& bundle) {
  std::vector<int> ids;
  for (const auto& m : bundle.models) ids.push_back(m.id);
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    const double aa = bundle.model(a).id_val_accuracy;
    const double ab = bundle.model(b).id_val_accuracy;
    if (aa != ab) return aa > ab;
    return a < b;
  });
  return ids;
}

CandidateDistance candidate_distance(const WeightVector& wa_weights, const BitVector& wa_id_val,
                                     const ModelEntry& candidate) {
  return {candidate.id, ratio_error(wa_id_val, candidate.correctness.id_val),
          euclidean_sq(wa_weights, candidate.weights)};
}

std::vector<CandidateDistance> ranked_order(std::vector<CandidateDistance> pool, DistanceKind kind) {
  std::stable_sort(pool.begin(), pool.end(), [kind](const CandidateDistance& a, const CandidateDistance& b) {
    const double da = a.of(kind);
    const double db = b.of(kind);
    if (da != db) return da > db;
    return a.id < b.id;
  });
  return pool;
}

namespace {

struct Evaluated {
  CandidateEval eval;
  Evaluation evaluation;
};

// Mutable state of one selection run.
class Soup {
 public:
  Soup(const Bundle& bundle, const Evaluator& evaluator) : bundle_(bundle), evaluator_(evaluator) {
    if (bundle.models.empty()) throw DataError("cannot build a soup from an empty bundle");
  }

  void start(int initial_id) {
    members_ = {&bundle_.model(initial_id)};
    weights_ = members_.front()->weights;
    const Evaluation ev = evaluator_.evaluate(weights_);
    state_ = {{initial_id}, ev.id_val_accuracy(), ev.ood_accuracy(), ev.id_val, ev.ood_test};
  }

  const WaState& state() const { return state_; }

  std::vector<CandidateDistance> pool_distances(const std::vector<int>& ids) const {
    std::vector<CandidateDistance> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(candidate_distance(weights_, state_.id_val_correct, bundle_.model(id)));
    return out;
  }

  Evaluated evaluate(const CandidateDistance& d, Acceptance rule) const {
    auto with = members_;
    with.push_back(&bundle_.model(d.id));
    const Evaluation ev = evaluator_.evaluate(average_weights(std::span<const WeightVector* const>(weights_of(with))));
    CandidateEval ce{d.id, ev.id_val_accuracy(), ev.ood_accuracy(), d.diversity, d.euclidean, false};
    ce.passed = passes(rule, ce.wa_id_val_accuracy, state_.id_val_accuracy);
    return {ce, ev};
  }

  void accept(const Evaluated& e) {
    members_.push_back(&bundle_.model(e.eval.candidate_id));
    weights_ = average_weights(std::span<const WeightVector* const>(weights_of(members_)));
    state_.ingredients.push_back(e.eval.candidate_id);
    state_.id_val_accuracy = e.eval.wa_id_val_accuracy;
    state_.ood_accuracy = e.eval.wa_ood_accuracy;
    state_.id_val_correct = e.evaluation.id_val;
    state_.ood_correct = e.evaluation.ood_test;
  }

 private:
  static std::vector<const WeightVector*> weights_of(const std::vector<const ModelEntry*>& ms) {
    std::vector<const WeightVector*> out;
    out.reserve(ms.size());
    for (const auto* m : ms) out.push_back(&m->weights);
    return out;
  }

  const Bundle& bundle_;
  const Evaluator& evaluator_;
  std::vector<const ModelEntry*> members_;
  WeightVector weights_;
  WaState state_;
};

SoupTrajectory begin(const Bundle& bundle, Algorithm algo, Acceptance accept, Soup& soup, std::vector<int>& order) {
  order = accuracy_order(bundle);
  soup.start(order.front());
  SoupTrajectory t;
  t.algorithm = algo;
  t.acceptance = accept;
  t.initial_model_id = order.front();
  for (const auto& m : bundle.models) t.model_ids.push_back(m.id);
  t.initial = soup.state();
  return t;
}

void remove_id(std::vector<int>& v, int id) { v.erase(std::find(v.begin(), v.end(), id)); }

}  // namespace

CandidateEval evaluate_candidate(std::span<const ModelEntry* const> ingredients, const ModelEntry& candidate,
                                 const Evaluator& evaluator) {
  if (ingredients.empty()) throw std::invalid_argument("evaluate_candidate: no ingredients");
  for (const auto* m : ingredients) {
    if (m->id == candidate.id) throw std::invalid_argument("evaluate_candidate: candidate already an ingredient");
  }
  std::vector<const WeightVector*> current;
  for (const auto* m : ingredients) current.push_back(&m->weights);
  const WeightVector wa = average_weights(std::span<const WeightVector* const>(current));
  const Evaluation wa_eval = evaluator.evaluate(wa);
  current.push_back(&candidate.weights);
  const Evaluation cand_eval = evaluator.evaluate(average_weights(std::span<const WeightVector* const>(current)));
  const CandidateDistance d = candidate_distance(wa, wa_eval.id_val, candidate);
  return {candidate.id, cand_eval.id_val_accuracy(), cand_eval.ood_accuracy(), d.diversity, d.euclidean, false};
}

SoupTrajectory run_greedy(const Bundle& bundle, const Evaluator& evaluator, Acceptance accept) {
  Soup soup(bundle, evaluator);
  std::vector<int> order;
  SoupTrajectory traj = begin(bundle, Algorithm::Greedy, accept, soup, order);
  std::vector<int> unvisited(order.begin() + 1, order.end());

  for (int t = 1; !unvisited.empty(); ++t) {
    Iteration it;
    it.t = t;
    it.remaining_before = unvisited;
    std::sort(it.remaining_before.begin(), it.remaining_before.end());
    it.pool = soup.pool_distances(it.remaining_before);

    std::size_t visited = 0;
    for (int id : unvisited) {
      const auto& d = *std::find_if(it.pool.begin(), it.pool.end(), [id](const auto& p) { return p.id == id; });
      const Evaluated e = soup.evaluate(d, accept);
      it.evals.push_back(e.eval);
      ++visited;
      if (e.eval.passed) {
        it.selected_id = id;
        soup.accept(e);
        break;
      }
      it.discarded.push_back(id);
    }
    unvisited.erase(unvisited.begin(), unvisited.begin() + static_cast<std::ptrdiff_t>(visited));
    it.wa_after = soup.state();
    traj.iterations.push_back(std::move(it));
    traj.terminated_at = t;
  }
  return traj;
}

SoupTrajectory run_greedier(const Bundle& bundle, const Evaluator& evaluator, Acceptance accept, int jobs) {
  Soup soup(bundle, evaluator);
  std::vector<int> order;
  SoupTrajectory traj = begin(bundle, Algorithm::Greedier, accept, soup, order);
  std::vector<int> remaining(order.begin() + 1, order.end());
  std::sort(remaining.begin(), remaining.end());

  for (int t = 1; !remaining.empty(); ++t) {
    Iteration it;
    it.t = t;
    it.remaining_before = remaining;
    it.pool = soup.pool_distances(remaining);

    std::vector<Evaluated> results(it.pool.size());
    parallel_for(it.pool.size(), jobs, [&](std::size_t i) { results[i] = soup.evaluate(it.pool[i], accept); });

    // pool is in ascending id, so the first maximum has the lowest id
    std::size_t best = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      it.evals.push_back(results[i].eval);
      if (results[i].eval.wa_id_val_accuracy > results[best].eval.wa_id_val_accuracy) best = i;
    }
    const bool accepted = results[best].eval.passed;
    if (accepted) {
      it.selected_id = results[best].eval.candidate_id;
      soup.accept(results[best]);
      remove_id(remaining, *it.selected_id);
    }
    it.wa_after = soup.state();
    traj.iterations.push_back(std::move(it));
    traj.terminated_at = t;
    if (!accepted) break;
  }
  return traj;
}

SoupTrajectory run_ranked(const Bundle& bundle, const Evaluator& evaluator, DistanceKind kind, Acceptance accept) {
  Soup soup(bundle, evaluator);
  std::vector<int> order;
  const Algorithm algo = kind == DistanceKind::Diversity ? Algorithm::RankedDiversity : Algorithm::RankedEuclidean;
  SoupTrajectory traj = begin(bundle, algo, accept, soup, order);
  std::vector<int> remaining(order.begin() + 1, order.end());
  std::sort(remaining.begin(), remaining.end());

  for (int t = 1; !remaining.empty(); ++t) {
    Iteration it;
    it.t = t;
    it.remaining_before = remaining;
    it.pool = soup.pool_distances(remaining);

    for (const auto& d : ranked_order(it.pool, kind)) {
      const Evaluated e = soup.evaluate(d, accept);
      it.evals.push_back(e.eval);
      if (e.eval.passed) {
        it.selected_id = d.id;
        soup.accept(e);
        remove_id(remaining, d.id);
        break;
      }
    }
    const bool accepted = it.selected_id.has_value();
    it.wa_after = soup.state();
    traj.iterations.push_back(std::move(it));
    traj.terminated_at = t;
    if (!accepted) break;
  }
  return traj;
}

SoupTrajectory run_algorithm(Algorithm algo, const Bundle& bundle, const Evaluator& evaluator, Acceptance accept,
                             int jobs) {
  switch (algo) {
    case Algorithm::Greedy: return run_greedy(bundle, evaluator, accept);
    case Algorithm::Greedier: return run_greedier(bundle, evaluator, accept, jobs);
    case Algorithm::RankedDiversity: return run_ranked(bundle, evaluator, DistanceKind::Diversity, accept);
    case Algorithm::RankedEuclidean: return run_ranked(bundle, evaluator, DistanceKind::Euclidean, accept);
  }
  throw std::logic_error("unreachable");
}

}  // namespace soup
