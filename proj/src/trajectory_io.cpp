#include "soup/soup_algos.hpp"

namespace soup {

namespace {

json distance_json(double d) { return d == kInfiniteDiversity ? json("inf") : json(d); }

double distance_from(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInfiniteDiversity;
    throw DataError("bad distance value " + j.dump());
  }
  return j.get<double>();
}

json state_json(const WaState& s) {
  return {{"ingredients", s.ingredients},
          {"id_val_accuracy", s.id_val_accuracy},
          {"ood_accuracy", s.ood_accuracy},
          {"id_val_correct", s.id_val_correct.to_hex()},
          {"ood_correct", s.ood_correct.to_hex()}};
}

WaState state_from(const json& j, std::size_t n_id, std::size_t n_ood) {
  WaState s;
  s.ingredients = j.at("ingredients").get<std::vector<int>>();
  s.id_val_accuracy = j.at("id_val_accuracy").get<double>();
  s.ood_accuracy = j.at("ood_accuracy").get<double>();
  s.id_val_correct = BitVector::from_hex(j.at("id_val_correct").get<std::string>(), n_id);
  s.ood_correct = BitVector::from_hex(j.at("ood_correct").get<std::string>(), n_ood);
  return s;
}

}  // namespace

json to_json(const SoupTrajectory& t) {
  json iters = json::array();
  for (const auto& it : t.iterations) {
    json pool = json::array();
    for (const auto& p : it.pool) {
      pool.push_back({{"id", p.id}, {"diversity", distance_json(p.diversity)}, {"euclidean", p.euclidean}});
    }
    json evals = json::array();
    for (const auto& e : it.evals) {
      evals.push_back({{"candidate_id", e.candidate_id},
                       {"wa_id_val_accuracy", e.wa_id_val_accuracy},
                       {"wa_ood_accuracy", e.wa_ood_accuracy},
                       {"diversity", distance_json(e.diversity)},
                       {"euclidean", e.euclidean},
                       {"passed", e.passed}});
    }
    iters.push_back({{"t", it.t},
                     {"remaining_before", it.remaining_before},
                     {"pool", pool},
                     {"evals", evals},
                     {"selected_id", it.selected_id ? json(*it.selected_id) : json(nullptr)},
                     {"discarded", it.discarded},
                     {"wa_after", state_json(it.wa_after)}});
  }
  return {{"schema", "soup-trajectory"},
          {"schema_version", kTrajectorySchemaVersion},
          {"algorithm", algorithm_name(t.algorithm)},
          {"acceptance", acceptance_name(t.acceptance)},
          {"bundle", t.bundle},
          {"config_hash", t.config_hash},
          {"model_ids", t.model_ids},
          {"split_sizes", {{"id_val", t.initial.id_val_correct.size()}, {"ood_test", t.initial.ood_correct.size()}}},
          {"initial_model_id", t.initial_model_id},
          {"initial", state_json(t.initial)},
          {"iterations", iters},
          {"terminated_at", t.terminated_at}};
}

SoupTrajectory trajectory_from_json(const json& j) {
  if (j.value("schema", "") != "soup-trajectory") throw DataError("not a trajectory document");
  const int version = j.value("schema_version", -1);
  if (version != kTrajectorySchemaVersion) {
    throw SchemaError("trajectory schema version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kTrajectorySchemaVersion) + ")");
  }
  try {
    SoupTrajectory t;
    t.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    t.acceptance = parse_acceptance(j.at("acceptance").get<std::string>());
    t.bundle = j.value("bundle", "");
    t.config_hash = j.value("config_hash", "");
    t.model_ids = j.at("model_ids").get<std::vector<int>>();
    const std::size_t n_id = j.at("split_sizes").at("id_val").get<std::size_t>();
    const std::size_t n_ood = j.at("split_sizes").at("ood_test").get<std::size_t>();
    t.initial_model_id = j.at("initial_model_id").get<int>();
    t.initial = state_from(j.at("initial"), n_id, n_ood);
    for (const auto& ji : j.at("iterations")) {
      Iteration it;
      it.t = ji.at("t").get<int>();
      it.remaining_before = ji.at("remaining_before").get<std::vector<int>>();
      for (const auto& p : ji.at("pool")) {
        it.pool.push_back({p.at("id").get<int>(), distance_from(p.at("diversity")), p.at("euclidean").get<double>()});
      }
      for (const auto& e : ji.at("evals")) {
        it.evals.push_back({e.at("candidate_id").get<int>(), e.at("wa_id_val_accuracy").get<double>(),
                            e.at("wa_ood_accuracy").get<double>(), distance_from(e.at("diversity")),
                            e.at("euclidean").get<double>(), e.at("passed").get<bool>()});
      }
      if (!ji.at("selected_id").is_null()) it.selected_id = ji.at("selected_id").get<int>();
      it.discarded = ji.at("discarded").get<std::vector<int>>();
      it.wa_after = state_from(ji.at("wa_after"), n_id, n_ood);
      t.iterations.push_back(std::move(it));
    }
    t.terminated_at = j.at("terminated_at").get<int>();
    return t;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed trajectory: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed trajectory: ") + e.what());
  }
}

}  // namespace soup
