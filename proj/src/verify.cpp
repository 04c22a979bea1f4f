#include <algorithm>
#include <set>
#include <sstream>

#include "soup/soup_algos.hpp"

namespace soup {

std::vector<std::string> verify_trajectory(const SoupTrajectory& t) {
  std::vector<std::string> problems;
  auto report = [&](int step, const std::string& msg) {
    std::ostringstream os;
    os << algorithm_name(t.algorithm) << " t=" << step << ": " << msg;
    problems.push_back(os.str());
  };

  const std::set<int> all(t.model_ids.begin(), t.model_ids.end());
  std::set<int> ingredients{t.initial_model_id};
  std::set<int> discarded;
  std::set<int> remaining = all;
  remaining.erase(t.initial_model_id);
  if (!all.contains(t.initial_model_id)) report(0, "initial model not in population");
  if (t.initial.ingredients != std::vector<int>{t.initial_model_id}) report(0, "initial state must hold only the initial model");

  const WaState* current = &t.initial;
  int expected_t = 1;
  for (const auto& it : t.iterations) {
    if (it.t != expected_t++) report(it.t, "step indices must run 1, 2, ...");
    if (std::set<int>(it.remaining_before.begin(), it.remaining_before.end()) != remaining) {
      report(it.t, "remaining set does not match the models not yet used or discarded");
    }
    std::set<int> pool_ids;
    for (const auto& p : it.pool) pool_ids.insert(p.id);
    if (pool_ids != remaining) report(it.t, "distance pool must cover exactly the remaining models");
    for (const auto& p : it.pool) {
      if (!(p.diversity >= 0.0) || !(p.euclidean >= 0.0)) report(it.t, "negative or NaN distance");
    }
    for (const auto& e : it.evals) {
      if (!remaining.contains(e.candidate_id)) report(it.t, "evaluated a model outside the pool: " + std::to_string(e.candidate_id));
      if (e.wa_id_val_accuracy < 0.0 || e.wa_id_val_accuracy > 1.0 || e.wa_ood_accuracy < 0.0 || e.wa_ood_accuracy > 1.0) {
        report(it.t, "accuracy outside [0,1]");
      }
      if (e.passed != passes(t.acceptance, e.wa_id_val_accuracy, current->id_val_accuracy)) {
        report(it.t, "recorded pass flag disagrees with the acceptance rule for " + std::to_string(e.candidate_id));
      }
    }

    const CandidateEval* sel = nullptr;
    if (it.selected_id) {
      auto found = std::find_if(it.evals.begin(), it.evals.end(), [&](const auto& e) { return e.candidate_id == *it.selected_id; });
      if (found == it.evals.end()) {
        report(it.t, "selected model has no evaluation");
      } else {
        sel = &*found;
        if (!sel->passed) report(it.t, "selected model failed the acceptance rule");
        if (!passes(t.acceptance, sel->wa_id_val_accuracy, current->id_val_accuracy)) {
          report(it.t, "WA accuracy does not improve under the acceptance rule");
        }
      }
      if (ingredients.contains(*it.selected_id)) report(it.t, "model selected twice");
    }

    switch (t.algorithm) {
      case Algorithm::Greedier: {
        if (it.evals.size() != remaining.size()) report(it.t, "greedier must evaluate every remaining model");
        double best = -1.0;
        int best_id = 0;
        for (const auto& e : it.evals) {
          if (e.wa_id_val_accuracy > best || (e.wa_id_val_accuracy == best && e.candidate_id < best_id)) {
            best = e.wa_id_val_accuracy;
            best_id = e.candidate_id;
          }
        }
        if (sel && (sel->wa_id_val_accuracy != best || sel->candidate_id != best_id)) {
          report(it.t, "greedier selection is not the step argmax");
        }
        if (!sel && !it.evals.empty() && passes(t.acceptance, best, current->id_val_accuracy)) {
          report(it.t, "greedier stopped although the best candidate passes");
        }
        break;
      }
      case Algorithm::RankedDiversity:
      case Algorithm::RankedEuclidean: {
        const DistanceKind kind =
            t.algorithm == Algorithm::RankedDiversity ? DistanceKind::Diversity : DistanceKind::Euclidean;
        const auto order = ranked_order(it.pool, kind);
        const std::size_t walked = it.evals.size();
        for (std::size_t i = 0; i < walked && i < order.size(); ++i) {
          if (it.evals[i].candidate_id != order[i].id) {
            report(it.t, "ranked walk deviates from decreasing-distance order");
            break;
          }
        }
        for (std::size_t i = 0; i + 1 < walked; ++i) {
          if (it.evals[i].passed) report(it.t, "ranked walk continued past a passing candidate");
        }
        if (sel && &it.evals.back() != sel) report(it.t, "ranked selection must end the walk");
        if (!sel && walked != remaining.size()) report(it.t, "ranked stopped before walking the whole pool");
        break;
      }
      case Algorithm::Greedy: {
        for (std::size_t i = 0; i + 1 < it.evals.size(); ++i) {
          if (it.evals[i].passed) report(it.t, "greedy continued past a passing candidate");
        }
        std::vector<int> rejected;
        for (const auto& e : it.evals) {
          if (!sel || e.candidate_id != sel->candidate_id) rejected.push_back(e.candidate_id);
        }
        if (rejected != it.discarded) report(it.t, "greedy discard list must hold exactly the rejected candidates");
        break;
      }
    }
    if (t.algorithm != Algorithm::Greedy && !it.discarded.empty()) report(it.t, "only greedy discards models");

    for (int d : it.discarded) {
      remaining.erase(d);
      discarded.insert(d);
    }
    if (it.selected_id) {
      remaining.erase(*it.selected_id);
      ingredients.insert(*it.selected_id);
      auto expected = current->ingredients;
      expected.push_back(*it.selected_id);
      if (it.wa_after.ingredients != expected) report(it.t, "ingredient list does not extend the previous one");
      if (sel && it.wa_after.id_val_accuracy != sel->wa_id_val_accuracy) report(it.t, "WA accuracy differs from its evaluation");
      current = &it.wa_after;
    } else if (!(it.wa_after == *current)) {
      report(it.t, "WA changed without a selection");
    }

    // conservation: ingredients, remaining and discarded partition the population
    std::set<int> uni = ingredients;
    uni.insert(remaining.begin(), remaining.end());
    uni.insert(discarded.begin(), discarded.end());
    if (uni != all || ingredients.size() + remaining.size() + discarded.size() != all.size()) {
      report(it.t, "ingredients, remaining and discarded do not partition the population");
    }
  }

  if (!t.iterations.empty()) {
    const auto& last = t.iterations.back();
    if (last.selected_id && !remaining.empty() && t.algorithm != Algorithm::Greedy) {
      report(last.t, "run ended after a selection with models still remaining");
    }
    if (t.terminated_at != last.t) report(last.t, "terminated_at must equal the last step");
  } else {
    if (t.terminated_at != 0) report(0, "terminated_at must be 0 without iterations");
    if (all.size() > 1) report(0, "no iterations although candidates remain");
  }
  return problems;
}

}  // namespace soup
