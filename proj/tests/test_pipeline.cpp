#include <cstdlib>
#include <regex>
#include <set>
#include <sys/wait.h>

#include "doctest.h"
#include "soup/pipeline.hpp"
#include "test_support.hpp"

using namespace soup;
using namespace soup::testing;
namespace fs = std::filesystem;

namespace {

// Small enough to generate in well under a second per bundle.
RunConfig small_config() {
  RunConfig c;
  c.trials = 1;
  c.environments = 1;
  c.models = 6;
  c.domains.train_per_domain = 120;
  c.domains.val_per_domain = 60;
  c.domains.test_per_domain = 60;
  c.finetune.pretrain_epochs = 5;
  c.finetune.epochs_min = 3;
  c.finetune.epochs_max = 6;
  c.finetune.train_fraction = 0.3;
  c.mds.max_iters = 60;
  c.mds.restarts = 2;
  return c;
}

int run_cli(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + (env.empty() ? "" : " ") + SOUPBENCH_BIN + std::string(" ") + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string cli_stderr(const std::string& args, const fs::path& tmp) {
  const fs::path err = tmp / "stderr.txt";
  [[maybe_unused]] const int rc = std::system((std::string(SOUPBENCH_BIN) + " " + args + " >/dev/null 2>" + err.string()).c_str());
  return read_file(err);
}

void write_config_file(const fs::path& p, const json& j) {
  std::ofstream f(p);
  f << j.dump();
}

}  // namespace

TEST_CASE("fnv1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("run config: defaults, round trip, hash, validation") {
  const RunConfig d;
  CHECK(d.trials == 10);
  CHECK(d.environments == 4);
  CHECK(d.models == 20);
  CHECK(d.algorithms.size() == 4);
  const json j = to_json(d);
  CHECK(to_json(run_config_from_json(j)) == j);
  CHECK(config_hash(run_config_from_json(j)) == config_hash(d));
  CHECK(config_hash(run_config_from_json(json::object())) == config_hash(d));

  RunConfig other = d;
  other.seed = 2;
  CHECK(config_hash(other) != config_hash(d));
  other = d;
  other.finetune.train_fraction = 0.5;
  CHECK(config_hash(other) != config_hash(d));

  const RunConfig partial = run_config_from_json({{"trials", 2}, {"accept", "strict"}, {"algorithms", {"greedy"}},
                                                   {"mds", {{"algorithms", {"greedy"}}}}});
  CHECK(partial.trials == 2);
  CHECK(partial.acceptance_for(Algorithm::Greedy) == Acceptance::Strict);
  CHECK(partial.algorithms == std::vector<Algorithm>{Algorithm::Greedy});
  CHECK(partial.environments == 4);

  CHECK(d.acceptance_for(Algorithm::Greedy) == Acceptance::NonStrict);
  CHECK(d.acceptance_for(Algorithm::Greedier) == Acceptance::Strict);

  CHECK_THROWS_AS(run_config_from_json({{"trails", 2}}), DataError);
  CHECK_THROWS_AS(run_config_from_json({{"mds", {{"trail", 0}}}}), DataError);
  CHECK_THROWS_AS(run_config_from_json({{"trials", 0}}), DataError);
  CHECK_THROWS_AS(run_config_from_json({{"environments", 5}}), DataError);
  CHECK_THROWS_AS(run_config_from_json({{"algorithms", {"fastest"}}}), DataError);
  CHECK_THROWS_AS(run_config_from_json({{"algorithms", {"greedy"}}}), DataError);  // mds needs greedier
  CHECK_THROWS_AS(run_config_from_json({{"accept", "lenient"}}), DataError);
  CHECK_THROWS_AS(run_config_from_json({{"trials", "ten"}}), DataError);
  CHECK_THROWS_AS(run_config_from_json({{"mlp", {{"widths", {2, 8, 3}}}}}), DataError);
}

TEST_CASE("point id helpers") {
  CHECK(ingredient_count_of("m12") == 1);
  CHECK(ingredient_count_of("wa4") == 4);
  CHECK(ingredient_count_of("c3_17") == 4);
  CHECK_THROWS_AS(ingredient_count_of("x1"), DataError);
  CHECK_THROWS_AS(ingredient_count_of("wa"), DataError);
}

TEST_CASE("generate: bundle grid, manifests, determinism") {
  TempDir tmp;
  SUBCASE("trials=1, envs=1 gives exactly one bundle") {
    const Layout out{tmp.path() / "a"};
    const auto dirs = cmd_generate(small_config(), out, 1);
    REQUIRE(dirs.size() == 1);
    std::size_t n = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(out.root / "bundles")) ++n;
    CHECK(n == 1);
    const Bundle b = load_bundle(dirs[0]);
    CHECK(b.models.size() == 6);
    CHECK(b.manifest.config_hash == config_hash(small_config()));
    const json cfg = json::parse(read_file(out.config()));
    CHECK(cfg.at("config_hash") == config_hash(small_config()));
    // models train on their own subsets
    CHECK(b.models[0].hyperparams.at("train_examples").get<std::size_t>() == 108);
  }
  SUBCASE("trials=2, envs=4 gives 8 bundles recording (trial, env)") {
    RunConfig c = small_config();
    c.trials = 2;
    c.environments = 4;
    c.models = 2;
    const Layout out{tmp.path() / "b"};
    const auto dirs = cmd_generate(c, out, 2);
    REQUIRE(dirs.size() == 8);
    std::set<std::pair<int, int>> seen;
    for (const auto& d : dirs) {
      const Bundle b = load_bundle(d);
      seen.insert({b.manifest.trial, b.manifest.environment});
      CHECK(d.filename() == run_label(b.manifest.trial, b.manifest.environment));
    }
    CHECK(seen.size() == 8);
  }
  SUBCASE("rerun gives byte-identical bundles, independent of --jobs") {
    RunConfig c = small_config();
    c.environments = 2;
    const Layout a{tmp.path() / "r1"}, b{tmp.path() / "r2"};
    cmd_generate(c, a, 1);
    cmd_generate(c, b, 3);
    CHECK(snapshot(a.root / "bundles") == snapshot(b.root / "bundles"));
    cmd_generate(c, a, 1);
    CHECK(snapshot(a.root / "bundles") == snapshot(b.root / "bundles"));
  }
}

TEST_CASE("soup: one file per algorithm, verifier clean, singleton") {
  TempDir tmp;
  RunConfig c = small_config();
  const Layout out{tmp.path()};
  cmd_generate(c, out, 1);
  const auto files = cmd_soup(c, out, 1);
  CHECK(files.size() == 4);
  for (const auto& f : files) {
    const auto t = load_trajectory(f);
    CHECK(t.bundle == "trial0_env0");
    CHECK(t.config_hash == config_hash(c));
  }
  CHECK(cmd_verify(c, out).empty());

  RunConfig one = c;
  one.models = 1;
  const Layout out1{tmp.path() / "single"};
  cmd_generate(one, out1, 1);
  for (const auto& f : cmd_soup(one, out1, 1)) {
    const auto t = load_trajectory(f);
    CHECK(t.initial.ingredients == std::vector<int>{1});
    CHECK(t.accepted_states().size() == 1);
  }
  CHECK(cmd_verify(one, out1).empty());
}

TEST_CASE("soup: invalid bundle is named in the error") {
  TempDir tmp;
  const RunConfig c = small_config();
  const Layout out{tmp.path()};
  cmd_generate(c, out, 1);
  fs::remove(out.bundle(0, 0) / "models" / "3.wts");
  try {
    cmd_soup(c, out, 1);
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("trial0_env0") != std::string::npos);
  }
}

TEST_CASE("analyze: single run reports zero-width intervals with n=1") {
  TempDir tmp;
  const RunConfig c = small_config();
  const Layout out{tmp.path()};
  cmd_generate(c, out, 1);
  cmd_soup(c, out, 1);
  const AnalysisReport r = cmd_analyze(c, out);
  CHECK(std::find(r.notes.begin(), r.notes.end(), "single run: confidence half-widths are 0 (n=1)") != r.notes.end());
  for (const auto& s : r.series.series)
    for (const auto& m : s.summary)
      if (m.n == 1) CHECK(m.half_width == 0.0);
  const std::string csv = read_file(out.analysis() / "series.csv");
  CHECK(csv.rfind("# config " + config_hash(c) + "\n", 0) == 0);

  // the JSON document reloads to the same series
  const AnalysisReport back = report_from_json(json::parse(read_file(out.analysis() / "analysis.json")));
  CHECK(to_json(back) == to_json(r));
  json tampered = to_json(r);
  tampered["schema_version"] = 99;
  CHECK_THROWS_AS(report_from_json(tampered), SchemaError);
}

TEST_CASE("mds: one embedding row per model and evaluated WA") {
  TempDir tmp;
  RunConfig c = small_config();
  c.models = 20;
  c.mds.kinds = {MdsKind::Metric};
  const Layout out{tmp.path()};
  cmd_generate(c, out, 1);
  cmd_soup(c, out, 1);
  const auto files = cmd_mds(c, out, 1);
  REQUIRE(files.size() == 2);
  const auto t = load_trajectory(out.trajectory(0, 0, Algorithm::Greedier));
  // oracle from the log: every model, every accepted WA, every non-selected evaluation
  std::size_t expected = t.model_ids.size() + t.accepted_states().size();
  for (const auto& it : t.iterations)
    for (const auto& e : it.evals) expected += !(it.selected_id && *it.selected_id == e.candidate_id);
  for (const auto& f : files) {
    const std::string csv = read_file(f);
    CHECK(csv.rfind("# config " + config_hash(c) + "\nid,x,y,accuracy,role\n", 0) == 0);
    CHECK(count_occurrences(csv, "\n") == expected + 2);
    CHECK(count_occurrences(csv, ",model\n") == 20);
    CHECK(count_occurrences(csv, ",wa\n") == t.accepted_states().size());
  }
}

TEST_CASE("scene points: candidate WAs are recomputed consistently") {
  TempDir tmp;
  const RunConfig c = small_config();
  const Layout out{tmp.path()};
  cmd_generate(c, out, 1);
  cmd_soup(c, out, 1);
  const Bundle b = load_bundle(out.bundle(0, 0));
  const auto ev = make_evaluator(b);
  const auto t = load_trajectory(out.trajectory(0, 0, Algorithm::Greedier));
  const ScenePoints s = collect_scene_points(b, t, *ev);
  for (std::size_t i = 0; i < s.ids.size(); ++i) {
    CHECK(s.ingredient_count[i] == ingredient_count_of(s.ids[i]));
    CHECK(accuracy_of(s.id_val_correct[i]) == doctest::Approx(s.accuracy[i]));
  }
}

TEST_CASE("end to end: every figure family, byte-identical reruns") {
  TempDir tmp;
  RunConfig c = small_config();
  c.environments = 2;
  const auto full = [&](const Layout& out, int jobs) {
    cmd_generate(c, out, jobs);
    cmd_soup(c, out, jobs);
    REQUIRE(cmd_verify(c, out).empty());
    cmd_analyze(c, out);
    cmd_mds(c, out, jobs);
    return cmd_report(c, out, jobs);
  };
  const Layout a{tmp.path() / "a"}, b{tmp.path() / "b"};
  const auto figs = full(a, 1);
  full(b, 2);
  std::set<std::string> families;
  const std::regex name(R"(([a-z0-9-]+)_([a-z0-9-]+)_([a-z0-9]+)\.svg)");
  for (const auto& f : figs) {
    std::smatch m;
    const std::string fn = f.filename().string();
    REQUIRE(std::regex_match(fn, m, name));
    families.insert(m[1]);
    const std::string svg = read_file(f);
    CHECK(xml_problem(svg).empty());
    CHECK(svg.find(config_hash(c)) != std::string::npos);
  }
  for (const char* fam : {"accuracy", "accuracy-diff", "error-set1", "error-set4-diff", "apd", "quantile-diversity",
                          "quantile-euclidean", "distance-euclidean", "mds-trial0-greedier-euclidean-metric",
                          "mds-trial0-greedier-diversity-nonmetric"})
    CHECK_MESSAGE(families.count(fam) == 1, fam);
  CHECK(snapshot(a.root) == snapshot(b.root));
  CHECK(fs::exists(a.log()));
  // timestamps live only in run.log
  const std::regex stamp(R"(\d{4}-\d\d-\d\dT\d\d:\d\d:\d\dZ)");
  for (const auto& [path, text] : snapshot(a.root, {"run.log", "manifest.json"}))
    if (path.ends_with(".json") || path.ends_with(".csv") || path.ends_with(".svg"))
      CHECK_FALSE(std::regex_search(text, stamp));
}

TEST_CASE("cli: exit codes and output root") {
  TempDir tmp;
  const fs::path cfg = tmp.path() / "small.json";
  write_config_file(cfg, to_json(small_config()));
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 1);
  CHECK(run_cli("generate --no-such-flag") == 1);
  CHECK(run_cli("soup --algo fastest") == 1);
  CHECK(run_cli("soup --jobs 0") == 1);

  const fs::path out = tmp.path() / "out";
  // missing bundles are a data error naming the bundle
  CHECK(run_cli("soup --config " + cfg.string() + " --out " + out.string()) == 2);
  CHECK(cli_stderr("soup --config " + cfg.string() + " --out " + out.string(), tmp.path()).find("trial0_env0") !=
        std::string::npos);

  const fs::path bad = tmp.path() / "bad.json";
  write_config_file(bad, {{"trials", -1}});
  CHECK(run_cli("generate --config " + bad.string() + " --out " + out.string()) == 2);

  // SOUPBENCH_OUT is the default output root
  const fs::path env_out = tmp.path() / "env_out";
  CHECK(run_cli("generate --config " + cfg.string(), "SOUPBENCH_OUT=" + env_out.string()) == 0);
  CHECK(fs::exists(env_out / "bundles" / "trial0_env0" / "manifest.json"));

  CHECK(run_cli("run --config " + cfg.string() + " --out " + out.string() + " --jobs 2") == 0);
  CHECK(fs::exists(out / "report" / "accuracy-diff_pooled_all.svg"));
  // later stages read <out>/config.json
  CHECK(run_cli("verify --out " + out.string()) == 0);
  CHECK(run_cli("report --out " + out.string()) == 0);

  // schema-version mismatch is reported explicitly
  const fs::path traj = out / "trajectories" / "trial0_env0" / "greedy.json";
  json j = json::parse(read_file(traj));
  j["schema_version"] = 99;
  write_config_file(traj, j);
  CHECK(run_cli("verify --out " + out.string()) == 2);
  CHECK(cli_stderr("verify --out " + out.string(), tmp.path()).find("schema") != std::string::npos);

  // --algo narrows the run; --accept overrides every rule
  const fs::path out2 = tmp.path() / "narrow";
  CHECK(run_cli("run --config " + cfg.string() + " --out " + out2.string() + " --algo greedier --accept strict") == 0);
  CHECK(fs::exists(out2 / "trajectories" / "trial0_env0" / "greedier.json"));
  CHECK_FALSE(fs::exists(out2 / "trajectories" / "trial0_env0" / "greedy.json"));
  const json saved = json::parse(read_file(out2 / "config.json"));
  CHECK(saved.at("config").at("accept") == "strict");
}
