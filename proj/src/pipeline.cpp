#include "soup/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "soup/parallel.hpp"

namespace fs = std::filesystem;

namespace soup {

namespace {

json algorithm_list(const std::vector<Algorithm>& algos) {
  json a = json::array();
  for (Algorithm x : algos) a.push_back(algorithm_name(x));
  return a;
}

std::vector<Algorithm> parse_algorithms(const json& j) {
  std::vector<Algorithm> out;
  for (const auto& s : j) {
    const auto name = s.get<std::string>();
    if (name == "all") {
      out.assign(std::begin(kAllAlgorithms), std::end(kAllAlgorithms));
      continue;
    }
    try {
      out.push_back(parse_algorithm(name));
    } catch (const std::exception&) {
      throw DataError("unknown algorithm '" + name + "'");
    }
  }
  return out;
}

// Keys of `user` must exist in `defaults`, recursively through objects.
void check_keys(const json& user, const json& defaults, const std::string& path) {
  if (!user.is_object()) return;
  if (!defaults.is_object()) throw DataError("config: '" + path + "' is not an object");
  for (const auto& [k, v] : user.items()) {
    const std::string p = path.empty() ? k : path + "." + k;
    if (!defaults.contains(k)) throw DataError("config: unknown key '" + p + "'");
    if (v.is_object()) check_keys(v, defaults.at(k), p);
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
  if (!f) throw DataError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void reset_dir(const fs::path& dir) {
  std::error_code ec;
  fs::remove_all(dir, ec);
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
}

struct Cell {
  int trial, env;
};

std::vector<Cell> cells(const RunConfig& c) {
  std::vector<Cell> out;
  for (int t = 0; t < c.trials; ++t)
    for (int e = 0; e < c.environments; ++e) out.push_back({t, e});
  return out;
}

// Re-raises data errors with the offending input named.
template <typename Fn>
auto naming(const std::string& what, Fn&& fn) {
  try {
    return fn();
  } catch (const SchemaError& e) {
    throw SchemaError(what + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(what + ": " + e.what());
  }
}

std::string family_token(std::string s) {
  for (char& ch : s)
    if (ch == '_') ch = '-';
  return s;
}

}  // namespace

void RunConfig::validate() const {
  if (trials < 1) throw DataError("config: trials must be >= 1");
  domains.validate();
  mlp.validate();
  finetune.validate();
  if (environments < 1 || environments > static_cast<int>(domains.domains.size()))
    throw DataError("config: environments must be in [1, " + std::to_string(domains.domains.size()) + "]");
  if (domains.domains.size() < 2) throw DataError("config: need an in-distribution domain besides the held-out one");
  if (models < 1) throw DataError("config: models must be >= 1");
  if (mlp.input_dim() != 2) throw DataError("config: MLP input width must be 2");
  if (mlp.n_classes() != static_cast<std::size_t>(domains.n_classes))
    throw DataError("config: MLP output width must equal the number of classes");
  if (algorithms.empty()) throw DataError("config: no algorithms selected");
  if (std::set<Algorithm>(algorithms.begin(), algorithms.end()).size() != algorithms.size())
    throw DataError("config: duplicate algorithm");
  if (mds.trial < 0 || mds.trial >= trials || mds.environment < 0 || mds.environment >= environments)
    throw DataError("config: mds selection outside the trial/environment grid");
  for (Algorithm a : mds.algorithms) {
    if (std::find(algorithms.begin(), algorithms.end(), a) == algorithms.end())
      throw DataError(std::string("config: mds algorithm '") + algorithm_name(a) + "' is not run");
  }
  if (mds.max_iters < 1 || mds.restarts < 1) throw DataError("config: mds needs max_iters and restarts >= 1");
}

json to_json(const RunConfig& c) {
  json dist = json::array(), kinds = json::array();
  for (auto k : c.mds.distances) dist.push_back(kind_name(k));
  for (auto k : c.mds.kinds) kinds.push_back(mds_kind_name(k));
  return {{"seed", c.seed},
          {"trials", c.trials},
          {"environments", c.environments},
          {"models", c.models},
          {"algorithms", algorithm_list(c.algorithms)},
          {"accept", c.accept ? acceptance_name(*c.accept) : "default"},
          {"domains", to_json(c.domains)},
          {"mlp", to_json(c.mlp)},
          {"finetune", to_json(c.finetune)},
          {"mds",
           {{"trial", c.mds.trial},
            {"environment", c.mds.environment},
            {"algorithms", algorithm_list(c.mds.algorithms)},
            {"distances", dist},
            {"kinds", kinds},
            {"max_iters", c.mds.max_iters},
            {"restarts", c.mds.restarts}}}};
}

MdsKind parse_mds_kind(const std::string& name) {
  if (name == "metric") return MdsKind::Metric;
  if (name == "nonmetric" || name == "non-metric") return MdsKind::NonMetric;
  throw DataError("unknown MDS kind '" + name + "'");
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw DataError("config: expected a JSON object");
  const RunConfig d;
  check_keys(j, to_json(d), "");
  try {
    RunConfig c;
    c.seed = j.value("seed", d.seed);
    c.trials = j.value("trials", d.trials);
    c.environments = j.value("environments", d.environments);
    c.models = j.value("models", d.models);
    if (j.contains("algorithms")) c.algorithms = parse_algorithms(j.at("algorithms"));
    const std::string accept = j.value("accept", std::string("default"));
    if (accept != "default") {
      try {
        c.accept = parse_acceptance(accept);
      } catch (const std::exception&) {
        throw DataError("config: unknown acceptance '" + accept + "'");
      }
    }
    if (j.contains("domains")) c.domains = domain_spec_from_json(j.at("domains"));
    if (j.contains("mlp")) c.mlp = mlp_spec_from_json(j.at("mlp"));
    if (j.contains("finetune")) c.finetune = finetune_config_from_json(j.at("finetune"));
    if (j.contains("mds")) {
      const json& m = j.at("mds");
      c.mds.trial = m.value("trial", d.mds.trial);
      c.mds.environment = m.value("environment", d.mds.environment);
      if (m.contains("algorithms")) c.mds.algorithms = parse_algorithms(m.at("algorithms"));
      if (m.contains("distances")) {
        c.mds.distances.clear();
        for (const auto& k : m.at("distances")) {
          try {
            c.mds.distances.push_back(parse_kind(k.get<std::string>()));
          } catch (const std::invalid_argument&) {
            throw DataError("config: unknown distance '" + k.get<std::string>() + "'");
          }
        }
      }
      if (m.contains("kinds")) {
        c.mds.kinds.clear();
        for (const auto& k : m.at("kinds")) c.mds.kinds.push_back(parse_mds_kind(k.get<std::string>()));
      }
      c.mds.max_iters = m.value("max_iters", d.mds.max_iters);
      c.mds.restarts = m.value("restarts", d.mds.restarts);
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
}

RunConfig load_run_config(const fs::path& path) {
  const json j = read_json(path);
  // accept the config.json written next to outputs as well
  if (j.is_object() && j.contains("config") && j.contains("config_hash"))
    return naming(path.string(), [&] { return run_config_from_json(j.at("config")); });
  return naming(path.string(), [&] { return run_config_from_json(j); });
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const RunConfig& c) { return fnv1a_hex(to_json(c).dump()); }

std::string run_label(int trial, int environment) {
  return "trial" + std::to_string(trial) + "_env" + std::to_string(environment);
}

void log_event(const Layout& out, const std::string& message) {
  static std::mutex mu;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  std::lock_guard lock(mu);
  fs::create_directories(out.root);
  std::ofstream f(out.log(), std::ios::app);
  f << stamp << ' ' << message << '\n';
}

std::string write_config(const RunConfig& c, const Layout& out) {
  std::error_code ec;
  fs::create_directories(out.root, ec);
  if (ec) throw DataError("cannot create output root " + out.root.string() + ": " + ec.message());
  const std::string h = config_hash(c);
  write_text(out.config(), json{{"config_hash", h}, {"config", to_json(c)}}.dump(2) + "\n");
  return h;
}

std::vector<fs::path> cmd_generate(const RunConfig& c, const Layout& out, int jobs) {
  const std::string h = write_config(c, out);
  const auto grid = cells(c);
  std::vector<fs::path> dirs(grid.size());
  log_event(out, "generate: " + std::to_string(grid.size()) + " bundles, config " + h);
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    const auto [t, e] = grid[i];
    PopulationRequest req;
    req.domains = c.domains;
    req.mlp = c.mlp;
    req.finetune = c.finetune;
    req.n_models = c.models;
    req.held_out = e;
    req.trial = t;
    req.seed = derive_seed(c.seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(e));
    req.config_hash = h;
    const Bundle b = naming(run_label(t, e), [&] { return build_population(req); });
    dirs[i] = out.bundle(t, e);
    reset_dir(dirs[i]);
    save_bundle(b, dirs[i]);
    log_event(out, "generate: wrote " + run_label(t, e));
  });
  return dirs;
}

SoupTrajectory load_trajectory(const fs::path& path) {
  return naming(path.string(), [&] { return trajectory_from_json(read_json(path)); });
}

std::vector<fs::path> cmd_soup(const RunConfig& c, const Layout& out, int jobs) {
  const std::string h = write_config(c, out);
  const auto grid = cells(c);
  std::vector<std::vector<fs::path>> files(grid.size());
  log_event(out, "soup: " + std::to_string(grid.size()) + " bundles x " + std::to_string(c.algorithms.size()) +
                     " algorithms");
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    const auto [t, e] = grid[i];
    const fs::path src = out.bundle(t, e);
    const Bundle b = naming("bundle " + src.string(), [&] { return load_bundle(src); });
    const auto ev = naming("bundle " + src.string(), [&] { return make_evaluator(b); });
    const fs::path dir = out.trajectories(t, e);
    reset_dir(dir);
    for (Algorithm a : c.algorithms) {
      SoupTrajectory traj = run_algorithm(a, b, *ev, c.acceptance_for(a));
      traj.bundle = run_label(t, e);
      traj.config_hash = h;
      const fs::path p = out.trajectory(t, e, a);
      write_text(p, to_json(traj).dump(1) + "\n");
      files[i].push_back(p);
    }
    log_event(out, "soup: " + run_label(t, e) + " done");
  });
  std::vector<fs::path> all;
  for (auto& f : files) all.insert(all.end(), f.begin(), f.end());
  return all;
}

AnalysisReport cmd_analyze(const RunConfig& c, const Layout& out) {
  const std::string h = write_config(c, out);
  std::vector<Run> runs;
  for (const auto [t, e] : cells(c)) {
    const fs::path src = out.bundle(t, e);
    const Bundle b = naming("bundle " + src.string(), [&] { return load_bundle(src); });
    std::vector<SoupTrajectory> trajs;
    for (Algorithm a : c.algorithms) trajs.push_back(load_trajectory(out.trajectory(t, e, a)));
    runs.push_back(make_run(b, std::move(trajs)));
  }
  AnalysisReport rep = analyze(runs, h);
  reset_dir(out.analysis());
  write_report(rep, out.analysis());
  log_event(out, "analyze: " + std::to_string(runs.size()) + " runs");
  return rep;
}

int ingredient_count_of(const std::string& id) {
  try {
    if (id.rfind("wa", 0) == 0) return std::stoi(id.substr(2));
    if (id.rfind("m", 0) == 0) return 1;
    if (id.rfind("c", 0) == 0) return std::stoi(id.substr(1, id.find('_') - 1)) + 1;
  } catch (const std::exception&) {
  }
  throw DataError("unrecognized point id '" + id + "'");
}

ScenePoints collect_scene_points(const Bundle& bundle, const SoupTrajectory& t, const Evaluator& evaluator) {
  ScenePoints s;
  const auto add = [&](std::string id, const char* role, WeightVector w, BitVector correct, double acc, int count) {
    s.ids.push_back(std::move(id));
    s.roles.push_back(role);
    s.weights.push_back(std::move(w));
    s.id_val_correct.push_back(std::move(correct));
    s.accuracy.push_back(acc);
    s.ingredient_count.push_back(count);
  };
  const auto average_of = [&](const std::vector<int>& ids) {
    std::vector<const WeightVector*> ws;
    for (int id : ids) ws.push_back(&bundle.model(id).weights);
    return average_weights(ws);
  };
  for (const auto& m : bundle.models)
    add(model_point_id(m.id), "model", m.weights, m.correctness.id_val, m.id_val_accuracy, 1);
  const auto states = t.accepted_states();
  for (std::size_t k = 0; k < states.size(); ++k) {
    add(wa_point_id(k + 1), "wa", average_of(states[k]->ingredients), states[k]->id_val_correct,
        states[k]->id_val_accuracy, static_cast<int>(k + 1));
  }
  for (const auto& it : t.iterations) {
    if (it.t < 1 || static_cast<std::size_t>(it.t) > states.size())
      throw DataError("trajectory step " + std::to_string(it.t) + " has no WA to start from");
    for (const auto& e : it.evals) {
      if (it.selected_id && *it.selected_id == e.candidate_id) continue;
      auto ids = states[it.t - 1]->ingredients;
      ids.push_back(e.candidate_id);
      WeightVector w = average_of(ids);
      Evaluation ev = evaluator.evaluate(w);
      add(candidate_point_id(it.t, e.candidate_id), "candidate-wa", std::move(w), std::move(ev.id_val),
          e.wa_id_val_accuracy, it.t + 1);
    }
  }
  return s;
}

namespace {

std::string mds_stem(Algorithm a, DistanceKind d, MdsKind k) {
  return std::string(algorithm_name(a)) + "_" + kind_name(d) + "_" + mds_kind_name(k);
}

}  // namespace

std::vector<fs::path> cmd_mds(const RunConfig& c, const Layout& out, int jobs) {
  const std::string h = write_config(c, out);
  const int t = c.mds.trial, e = c.mds.environment;
  const fs::path src = out.bundle(t, e);
  const Bundle b = naming("bundle " + src.string(), [&] { return load_bundle(src); });
  const auto ev = naming("bundle " + src.string(), [&] { return make_evaluator(b); });

  struct Task {
    Algorithm algo;
    DistanceKind distance;
    MdsKind kind;
    const ScenePoints* scene;
    std::shared_ptr<SquareMatrix> delta;
  };
  std::vector<ScenePoints> scenes;
  scenes.reserve(c.mds.algorithms.size());
  std::vector<Task> tasks;
  for (Algorithm a : c.mds.algorithms) {
    const SoupTrajectory traj = load_trajectory(out.trajectory(t, e, a));
    scenes.push_back(collect_scene_points(b, traj, *ev));
    const ScenePoints& sp = scenes.back();
    std::vector<DistanceItem> items;
    for (std::size_t i = 0; i < sp.ids.size(); ++i) items.push_back({sp.ids[i], &sp.weights[i], &sp.id_val_correct[i]});
    for (DistanceKind d : c.mds.distances) {
      auto delta = std::make_shared<SquareMatrix>(mds_input(pairwise_distance_matrix(items, d)));
      for (MdsKind k : c.mds.kinds) tasks.push_back({a, d, k, &sp, delta});
    }
  }
  const fs::path dir = out.mds(t, e);
  reset_dir(dir);
  std::vector<fs::path> files(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    const Task& task = tasks[i];
    MdsOptions opt;
    opt.max_iters = c.mds.max_iters;
    opt.restarts = c.mds.restarts;
    opt.seed = derive_seed(c.seed, 0x3d5);
    const Embedding emb = run_mds(task.kind, *task.delta, opt);
    std::vector<EmbeddedPoint> meta;
    for (std::size_t p = 0; p < task.scene->ids.size(); ++p)
      meta.push_back({task.scene->ids[p], task.scene->roles[p], task.scene->accuracy[p]});
    const std::string stem = mds_stem(task.algo, task.distance, task.kind);
    std::ostringstream csv;
    write_embedding_csv(emb, meta, h, csv);
    files[i] = dir / (stem + ".csv");
    write_text(files[i], csv.str());
    const json info = {{"config_hash", h},
                       {"algorithm", algorithm_name(task.algo)},
                       {"distance", kind_name(task.distance)},
                       {"kind", mds_kind_name(task.kind)},
                       {"points", emb.points.size()},
                       {"stress", emb.stress},
                       {"iterations_used", emb.iterations_used},
                       {"converged", emb.converged},
                       {"restart", emb.restart},
                       {"monotonicity_violations", emb.monotonicity_violations}};
    write_text(dir / (stem + ".json"), info.dump(1) + "\n");
    log_event(out, "mds: " + run_label(t, e) + " " + stem + " stress " + std::to_string(emb.stress));
  });
  return files;
}

namespace {

struct EmbeddingCsv {
  std::vector<std::string> ids;
  std::vector<Point2> points;
  std::vector<double> accuracy;
};

EmbeddingCsv read_embedding_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  EmbeddingCsv e;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "id,x,y,accuracy,role") throw DataError(path.string() + ": unexpected header");
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string id, x, y, acc;
    if (!std::getline(row, id, ',') || !std::getline(row, x, ',') || !std::getline(row, y, ',') ||
        !std::getline(row, acc, ','))
      throw DataError(path.string() + ": malformed row '" + line + "'");
    e.ids.push_back(id);
    e.points.push_back({std::stod(x), std::stod(y)});
    e.accuracy.push_back(std::stod(acc));
  }
  if (!header) throw DataError(path.string() + ": empty embedding");
  return e;
}

}  // namespace

std::vector<fs::path> cmd_report(const RunConfig& c, const Layout& out, int jobs) {
  const std::string h = write_config(c, out);
  const AnalysisReport rep =
      naming(out.analysis().string(), [&] { return report_from_json(read_json(out.analysis() / "analysis.json")); });
  const fs::path dir = out.report();
  reset_dir(dir);
  std::vector<fs::path> written;
  const auto save = [&](const std::string& family, const std::string& env, const std::string& t, const Figure& f) {
    const fs::path p = dir / (family + "_" + env + "_" + t + ".svg");
    write_text(p, f.svg);
    written.push_back(p);
    for (const auto& n : f.notes) log_event(out, "report: " + p.filename().string() + ": " + n);
  };

  // Mean series with confidence ribbons.
  std::vector<std::string> stats{"accuracy", "accuracy_diff", "apd"};
  for (int k = 1; k <= 4; ++k) {
    stats.push_back("error_set" + std::to_string(k));
    stats.push_back("error_set" + std::to_string(k) + "_diff");
  }
  for (const auto& stat : stats) {
    PlotSpec spec;
    spec.title = stat;
    spec.y_label = stat;
    spec.x_label = "ingredients";
    spec.config_hash = h;
    if (stat.find("_diff") != std::string::npos) spec.reference_lines = {0.0};
    try {
      save(family_token(stat), "pooled", "all", render_ci_lines(rep.series, stat, spec));
    } catch (const std::invalid_argument& e) {
      log_event(out, "report: skipped " + stat + ": " + e.what());
    }
  }

  // Per-step distributions.
  const auto boxes = [&](const std::string& family, const std::vector<BoxGroup>& groups, PlotSpec spec) {
    spec.title = family;
    spec.config_hash = h;
    try {
      save(family, "pooled", "all", render_boxplots(groups, spec));
    } catch (const std::invalid_argument& e) {
      log_event(out, "report: skipped " + family + ": " + e.what());
    }
  };
  for (const auto& [k, recs] : rep.quantiles) {
    PlotSpec spec;
    spec.y_label = "selection quantile";
    spec.reference_lines = {0.5};
    spec.y_range = std::pair{0.0, 1.05};
    boxes(std::string("quantile-") + kind_name(k), quantile_groups(recs), spec);
  }
  for (const auto& [k, bins] : rep.distance_bins) {
    PlotSpec spec;
    spec.y_label = std::string("selected ") + kind_name(k);
    boxes(std::string("distance-") + kind_name(k), distance_groups(bins), spec);
  }
  {
    std::map<int, std::vector<double>> by_t;
    for (const auto& q : rep.apd_quantiles) by_t[q.t].push_back(q.quantile);
    std::vector<BoxGroup> groups;
    for (auto& [t, v] : by_t) groups.push_back({"greedier", t, std::move(v)});
    PlotSpec spec;
    spec.y_label = "APD quantile";
    spec.reference_lines = {0.5};
    spec.y_range = std::pair{0.0, 1.05};
    if (!groups.empty()) boxes("apd-quantile", groups, spec);
  }

  // MDS trajectory frames.
  const int mt = c.mds.trial, me = c.mds.environment;
  struct FrameTask {
    std::string family;
    MdsScene scene;
    SoupTrajectory traj;
    PlotSpec spec;
    std::vector<MdsFrame> frames;
  };
  std::vector<FrameTask> tasks;
  for (Algorithm a : c.mds.algorithms) {
    const SoupTrajectory traj = load_trajectory(out.trajectory(mt, me, a));
    for (DistanceKind d : c.mds.distances) {
      for (MdsKind k : c.mds.kinds) {
        const std::string stem = mds_stem(a, d, k);
        const EmbeddingCsv e = read_embedding_csv(out.mds(mt, me) / (stem + ".csv"));
        FrameTask task;
        task.family = family_token("mds-trial" + std::to_string(mt) + "-" + stem);
        task.scene.ids = e.ids;
        task.scene.points = e.points;
        task.scene.accuracy = e.accuracy;
        for (const auto& id : e.ids) task.scene.ingredient_count.push_back(ingredient_count_of(id));
        try {
          task.scene.backdrop = triangulate(e.points, e.accuracy);
        } catch (const DataError& err) {
          log_event(out, "report: " + stem + ": no backdrop: " + err.what());
        }
        task.traj = traj;
        task.spec.title = std::string(algorithm_name(a)) + ", " + kind_name(d) + ", " + mds_kind_name(k) + " MDS";
        task.spec.config_hash = h;
        tasks.push_back(std::move(task));
      }
    }
  }
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    tasks[i].frames = render_mds_frames(tasks[i].scene, tasks[i].traj, tasks[i].spec);
  });
  const std::string env = "env" + std::to_string(me);
  for (const auto& task : tasks) {
    for (const auto& f : task.frames) {
      Figure fig;
      fig.svg = f.svg;
      save(task.family, env, std::to_string(f.t), fig);
    }
  }
  log_event(out, "report: " + std::to_string(written.size()) + " figures");
  return written;
}

std::vector<std::string> cmd_verify(const RunConfig& c, const Layout& out) {
  std::vector<std::string> problems;
  for (const auto [t, e] : cells(c)) {
    for (Algorithm a : c.algorithms) {
      const fs::path p = out.trajectory(t, e, a);
      const SoupTrajectory traj = load_trajectory(p);
      for (const auto& m : verify_trajectory(traj)) problems.push_back(p.string() + ": " + m);
      if (traj.algorithm != a) problems.push_back(p.string() + ": algorithm field does not match the file name");
    }
  }
  return problems;
}

}  // namespace soup
