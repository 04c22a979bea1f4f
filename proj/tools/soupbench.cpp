// soupbench: build weight-ensembles over synthetic model populations and
// analyze their selections.
//
//   soupbench generate|soup|analyze|mds|report|verify|run|config [options]
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 internal error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "soup/pipeline.hpp"

namespace fs = std::filesystem;
using namespace soup;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> algos;
  std::string accept;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials, envs;
  std::optional<std::size_t> models;
};

fs::path output_root(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("SOUPBENCH_OUT"); env && *env) return env;
  return "soupbench-out";
}

RunConfig resolve_config(const Options& o, const Layout& out, bool fresh) {
  RunConfig c;
  if (!o.config.empty()) {
    c = load_run_config(o.config);
  } else if (!fresh && fs::exists(out.config())) {
    c = load_run_config(out.config());
  }
  if (o.seed) c.seed = *o.seed;
  if (o.trials) c.trials = *o.trials;
  if (o.envs) c.environments = *o.envs;
  if (o.models) c.models = *o.models;
  if (!o.algos.empty()) {
    json names = o.algos;
    json patch = to_json(c);
    patch["algorithms"] = names;
    // keep the MDS selection consistent with a narrowed algorithm list
    json mds_algos = json::array();
    for (const auto& a : patch["mds"]["algorithms"])
      if (std::find(names.begin(), names.end(), a) != names.end() || names.front() == "all") mds_algos.push_back(a);
    if (mds_algos.empty()) mds_algos.push_back(patch["algorithms"].front());
    patch["mds"]["algorithms"] = mds_algos;
    c = run_config_from_json(patch);
  }
  if (!o.accept.empty()) c.accept = parse_acceptance(o.accept);
  if (c.mds.trial >= c.trials) c.mds.trial = 0;
  if (c.mds.environment >= c.environments) c.mds.environment = 0;
  c.validate();
  return c;
}

int run(int argc, char** argv) {
  CLI::App app{"Weight-ensemble selection benchmark"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "Run config JSON (defaults to <out>/config.json, then built-in defaults)");
  app.add_option("--out", o.out, "Output root (default: $SOUPBENCH_OUT or ./soupbench-out)");
  app.add_option("--algo", o.algos, "Algorithms to run")
      ->check(CLI::IsMember({"greedy", "greedier", "ranked-diversity", "ranked-euclidean", "all"}))
      ->delimiter(',');
  app.add_option("--accept", o.accept, "Acceptance rule for every algorithm (default: per algorithm)")
      ->check(CLI::IsMember({"strict", "nonstrict"}));
  app.add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--seed", o.seed, "Master seed");
  app.add_option("--trials", o.trials, "Trials")->check(CLI::PositiveNumber);
  app.add_option("--envs", o.envs, "Held-out environments per trial")->check(CLI::PositiveNumber);
  app.add_option("--models", o.models, "Models per population")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("generate", "Build one population bundle per trial and held-out environment");
  auto* soup_cmd = app.add_subcommand("soup", "Run the selection algorithms on every bundle");
  auto* ana = app.add_subcommand("analyze", "Aggregate trajectories into series, quantiles and distance bins");
  auto* mds = app.add_subcommand("mds", "Embed the models and WAs of the selected run");
  auto* rep = app.add_subcommand("report", "Render SVG figures from analysis and embeddings");
  auto* ver = app.add_subcommand("verify", "Check every trajectory against the algorithm invariants");
  auto* all = app.add_subcommand("run", "generate, soup, verify, analyze, mds and report in sequence");
  auto* cfg = app.add_subcommand("config", "Print the effective config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const Layout out{output_root(o)};
  const bool fresh = gen->parsed() || all->parsed();
  const RunConfig c = resolve_config(o, out, fresh);

  if (cfg->parsed()) {
    std::cout << json{{"config_hash", config_hash(c)}, {"config", to_json(c)}}.dump(2) << "\n";
    return 0;
  }
  const auto verify = [&] {
    const auto problems = cmd_verify(c, out);
    for (const auto& p : problems) std::cerr << p << "\n";
    std::cout << "verify: " << c.trials * c.environments * static_cast<int>(c.algorithms.size())
              << " trajectories, " << problems.size() << " violations\n";
    return problems.empty();
  };
  if (gen->parsed() || all->parsed())
    std::cout << "generate: " << cmd_generate(c, out, o.jobs).size() << " bundles under " << out.root / "bundles" << "\n";
  if (soup_cmd->parsed() || all->parsed())
    std::cout << "soup: " << cmd_soup(c, out, o.jobs).size() << " trajectories\n";
  if (ver->parsed() || all->parsed()) {
    if (!verify()) return 2;
  }
  if (ana->parsed() || all->parsed()) {
    const auto r = cmd_analyze(c, out);
    std::cout << "analyze: " << r.series.series.size() << " series";
    for (const auto& n : r.notes) std::cout << "; " << n;
    std::cout << "\n";
  }
  if (mds->parsed() || all->parsed()) std::cout << "mds: " << cmd_mds(c, out, o.jobs).size() << " embeddings\n";
  if (rep->parsed() || all->parsed()) std::cout << "report: " << cmd_report(c, out, o.jobs).size() << " figures\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const DataError& e) {
    std::cerr << "soupbench: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "soupbench: internal error: " << e.what() << "\n";
    return 3;
  }
}
