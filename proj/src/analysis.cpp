#include "soup/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <tuple>

namespace soup {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::vector<double> extend(const std::vector<double>& v, std::size_t len) {
  std::vector<double> out(v);
  out.resize(std::max(len, v.size()), v.empty() ? kMissing : v.back());
  return out;
}

std::size_t longest(const std::vector<std::vector<double>>& runs) {
  std::size_t len = 0;
  for (const auto& r : runs) len = std::max(len, r.size());
  return len;
}

Series make_series(const std::string& algorithm, const std::string& statistic,
                   const std::vector<std::vector<double>>& runs, const std::vector<std::size_t>& run_lengths,
                   std::size_t len, int t0) {
  Series s;
  s.algorithm = algorithm;
  s.statistic = statistic;
  for (std::size_t i = 0; i < len; ++i) {
    s.t.push_back(t0 + static_cast<int>(i));
    std::vector<double> col;
    std::vector<bool> carried;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      col.push_back(runs[r][i]);
      carried.push_back(i >= run_lengths[r]);
    }
    s.summary.push_back(summarize(col));
    s.values.push_back(std::move(col));
    s.carried.push_back(std::move(carried));
  }
  return s;
}

std::vector<Algorithm> common_algorithms(const std::vector<Run>& runs) {
  if (runs.empty()) return {};
  std::vector<Algorithm> algos;
  for (const auto& [a, _] : runs.front().trajectories) algos.push_back(a);
  for (const auto& r : runs) {
    std::vector<Algorithm> here;
    for (const auto& [a, _] : r.trajectories) here.push_back(a);
    if (here != algos) throw DataError("run '" + r.label + "' does not carry the same algorithms as the others");
  }
  return algos;
}

void require_benchmark(const std::vector<Run>& runs) {
  for (const auto& r : runs) {
    if (!r.trajectories.count(Algorithm::Greedier)) throw DataError("run '" + r.label + "' has no greedier trajectory");
  }
}

std::string stat_name(const std::string& base, Split split) { return base + "/" + split_name(split); }

void append(SeriesBundle& into, SeriesBundle from) {
  for (auto& s : from.series) into.series.push_back(std::move(s));
  into.max_t = std::max(into.max_t, from.max_t);
}

int last_t(const Series& s) { return s.t.empty() ? 0 : s.t.back(); }

const BitVector& model_bits(const Run& run, int id, Split split) {
  const auto it = run.models.find(id);
  if (it == run.models.end()) throw DataError("run '" + run.label + "' has no correctness for model " + std::to_string(id));
  return it->second.at(split);
}

double apd_of(const Run& run, const std::vector<int>& ids, Split split) {
  std::vector<const BitVector*> bits;
  for (int id : ids) bits.push_back(&model_bits(run, id, split));
  return avg_pairwise_diversity(bits).mean;
}

}  // namespace

Run make_run(const Bundle& bundle, std::vector<SoupTrajectory> trajectories) {
  Run r;
  r.trial = bundle.manifest.trial;
  r.environment = bundle.manifest.environment;
  r.label = "trial" + std::to_string(r.trial) + "_env" + std::to_string(r.environment);
  for (const auto& m : bundle.models) r.models[m.id] = m.correctness;
  for (auto& t : trajectories) r.trajectories[t.algorithm] = std::move(t);
  return r;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  double sum = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) {
      sum += v;
      ++s.n;
    } else {
      ++s.missing;
    }
  }
  if (s.n == 0) return s;
  s.mean = sum / static_cast<double>(s.n);
  // identical values: exact mean, no rounding residue in the spread
  const auto first = std::find_if(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
  if (std::all_of(first, values.end(), [&](double v) { return !std::isfinite(v) || v == *first; })) {
    s.mean = *first;
    s.half_width = 0.0;
    return s;
  }
  double ss = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) ss += (v - s.mean) * (v - s.mean);
  }
  const double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  s.half_width = 1.96 * sd / std::sqrt(static_cast<double>(s.n));
  return s;
}

const Series* SeriesBundle::find(const std::string& algorithm, const std::string& statistic) const {
  for (const auto& s : series) {
    if (s.algorithm == algorithm && s.statistic == statistic) return &s;
  }
  return nullptr;
}

Series aggregate(const std::string& algorithm, const std::string& statistic,
                 const std::vector<std::vector<double>>& runs, int t0) {
  const std::size_t len = longest(runs);
  std::vector<std::vector<double>> ext;
  std::vector<std::size_t> lengths;
  for (const auto& r : runs) {
    ext.push_back(extend(r, len));
    lengths.push_back(r.size());
  }
  return make_series(algorithm, statistic, ext, lengths, len, t0);
}

Series difference(const std::string& algorithm, const std::string& statistic,
                  const std::vector<std::vector<double>>& other, const std::vector<std::vector<double>>& benchmark,
                  int t0) {
  if (other.size() != benchmark.size()) throw DataError("run-count mismatch between " + algorithm + " and benchmark");
  const std::size_t len = std::max(longest(other), longest(benchmark));
  std::vector<std::vector<double>> diff;
  std::vector<std::size_t> lengths;
  for (std::size_t r = 0; r < other.size(); ++r) {
    const auto a = extend(other[r], len);
    const auto b = extend(benchmark[r], len);
    std::vector<double> d(len);
    for (std::size_t i = 0; i < len; ++i) d[i] = a[i] - b[i];
    diff.push_back(std::move(d));
    lengths.push_back(std::min(other[r].size(), benchmark[r].size()));
  }
  return make_series(algorithm, statistic, diff, lengths, len, t0);
}

std::vector<double> accuracy_by_ingredients(const SoupTrajectory& t, Split split) {
  std::vector<double> out;
  for (const auto* s : t.accepted_states()) out.push_back(s->accuracy(split));
  return out;
}

SeriesBundle benchmark_difference_series(const std::vector<Run>& runs) {
  const auto algos = common_algorithms(runs);
  require_benchmark(runs);
  SeriesBundle out;
  for (Split split : {Split::IdVal, Split::OodTest}) {
    std::map<Algorithm, std::vector<std::vector<double>>> full;
    for (Algorithm a : algos) {
      for (const auto& r : runs) full[a].push_back(accuracy_by_ingredients(r.trajectories.at(a), split));
    }
    for (Algorithm a : algos) {
      out.series.push_back(aggregate(algorithm_name(a), stat_name("accuracy", split), full[a], 1));
      // differences start at 2 ingredients; a run that never grew still
      // carries its single-model value forward
      Series d = difference(algorithm_name(a), stat_name("accuracy_diff", split), full[a], full[Algorithm::Greedier], 1);
      if (!d.t.empty()) {
        d.t.erase(d.t.begin());
        d.values.erase(d.values.begin());
        d.carried.erase(d.carried.begin());
        d.summary.erase(d.summary.begin());
      }
      out.series.push_back(std::move(d));
      out.max_t = std::max(out.max_t, last_t(out.series.back()));
    }
  }
  return out;
}

double mid_rank(const std::vector<double>& values, std::size_t index) {
  const double v = values.at(index);
  std::size_t less = 0, equal = 0;
  for (double x : values) {
    if (x < v) ++less;
    else if (x == v) ++equal;
  }
  return static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
}

std::vector<QuantileRecord> selection_quantiles(const SoupTrajectory& t, DistanceKind kind, std::size_t run) {
  std::vector<QuantileRecord> out;
  for (const auto& it : t.iterations) {
    if (!it.selected_id) continue;
    if (it.pool.empty()) throw DataError("step " + std::to_string(it.t) + " selected a model without recorded distances");
    std::vector<double> ds;
    std::size_t index = it.pool.size();
    for (const auto& c : it.pool) {
      if (std::find(it.discarded.begin(), it.discarded.end(), c.id) != it.discarded.end()) continue;
      if (c.id == *it.selected_id) index = ds.size();
      ds.push_back(c.of(kind));
    }
    if (index == it.pool.size()) throw DataError("selected model missing from the step's distance pool");
    QuantileRecord q;
    q.t = it.t;
    q.algorithm = t.algorithm;
    q.kind = kind;
    q.distance = ds[index];
    q.num_remaining = ds.size();
    q.quantile = mid_rank(ds, index) / static_cast<double>(ds.size());
    q.run = run;
    out.push_back(q);
  }
  return out;
}

std::vector<QuantileRecord> selection_quantile_series(const std::vector<Run>& runs, DistanceKind kind) {
  std::vector<QuantileRecord> out;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (const auto& [a, t] : runs[r].trajectories) {
      auto q = selection_quantiles(t, kind, r);
      out.insert(out.end(), q.begin(), q.end());
    }
  }
  return out;
}

Summary mean_quantile(const std::vector<QuantileRecord>& records, Algorithm algo, int max_t) {
  std::vector<double> v;
  for (const auto& q : records) {
    if (q.algorithm == algo && q.t <= max_t) v.push_back(q.quantile);
  }
  return summarize(v);
}

double quantile_linear(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return kMissing;
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || lo + 1 >= sorted.size()) return sorted[lo];
  const double a = sorted[lo], b = sorted[lo + 1];
  if (std::isinf(b)) return b;
  return a + frac * (b - a);
}

BoxStats box_stats(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }), values.end());
  BoxStats b;
  b.n = values.size();
  if (values.empty()) return b;
  std::sort(values.begin(), values.end());
  b.q1 = quantile_linear(values, 0.25);
  b.median = quantile_linear(values, 0.5);
  b.q3 = quantile_linear(values, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr, hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_lo = b.q1;
  b.whisker_hi = b.q3;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      b.outliers.push_back(v);
      continue;
    }
    b.whisker_lo = std::min(b.whisker_lo, v);
    b.whisker_hi = std::max(b.whisker_hi, v);
  }
  return b;
}

std::vector<DistanceBin> selection_distance_series(const std::vector<QuantileRecord>& records) {
  std::map<std::tuple<Algorithm, DistanceKind, int>, std::vector<double>> bins;
  for (const auto& q : records) bins[{q.algorithm, q.kind, q.t}].push_back(q.distance);
  std::vector<DistanceBin> out;
  for (auto& [key, vals] : bins) {
    DistanceBin b;
    std::tie(b.algorithm, b.kind, b.t) = key;
    std::sort(vals.begin(), vals.end());
    double sum = 0.0;
    std::size_t finite = 0;
    for (double v : vals) {
      if (std::isinf(v)) {
        ++b.infinite;
      } else {
        sum += v;
        ++finite;
      }
    }
    if (finite > 0) b.mean_finite = sum / static_cast<double>(finite);
    b.q1 = quantile_linear(vals, 0.25);
    b.median = quantile_linear(vals, 0.5);
    b.q3 = quantile_linear(vals, 0.75);
    b.values = std::move(vals);
    out.push_back(std::move(b));
  }
  return out;
}

ErrorDynamicsStep error_dynamics_step(const BitVector& wa_t, const BitVector& ingredient, const BitVector& wa_next) {
  if (wa_t.size() != ingredient.size() || wa_t.size() != wa_next.size())
    throw std::invalid_argument("error dynamics: correctness length mismatch");
  ErrorDynamicsStep s;
  std::array<std::size_t, 4> hits{};
  for (std::size_t i = 0; i < wa_t.size(); ++i) {
    const bool w = wa_t.get(i), g = ingredient.get(i), nx = wa_next.get(i);
    const int set = !w && g ? 0 : w && !g ? 1 : w && g ? 2 : 3;
    ++s.sizes[set];
    // the t+1 outcome matches the ingredient's outcome
    if (nx == g) ++hits[set];
  }
  for (int k = 0; k < 4; ++k) {
    if (s.sizes[k] > 0) s.probability[k] = static_cast<double>(hits[k]) / static_cast<double>(s.sizes[k]);
  }
  return s;
}

std::vector<ErrorDynamicsStep> error_dynamics(const SoupTrajectory& t, const Run& run, Split split) {
  std::vector<ErrorDynamicsStep> out;
  const WaState* prev = &t.initial;
  for (const auto& it : t.iterations) {
    if (!it.selected_id) continue;
    auto s = error_dynamics_step(prev->correct(split), model_bits(run, *it.selected_id, split), it.wa_after.correct(split));
    s.t = static_cast<int>(prev->ingredients.size());
    s.ingredient = *it.selected_id;
    out.push_back(s);
    prev = &it.wa_after;
  }
  return out;
}

SeriesBundle error_dynamics_series(const std::vector<Run>& runs, Split split) {
  const auto algos = common_algorithms(runs);
  require_benchmark(runs);
  SeriesBundle out;
  std::map<Algorithm, std::array<std::vector<std::vector<double>>, 4>> per;
  for (Algorithm a : algos) {
    for (const auto& r : runs) {
      const auto steps = error_dynamics(r.trajectories.at(a), r, split);
      for (int k = 0; k < 4; ++k) {
        std::vector<double> v;
        for (const auto& s : steps) v.push_back(s.probability[k]);
        per[a][k].push_back(std::move(v));
      }
    }
  }
  for (Algorithm a : algos) {
    for (int k = 0; k < 4; ++k) {
      const std::string base = "error_set" + std::to_string(k + 1);
      out.series.push_back(aggregate(algorithm_name(a), stat_name(base, split), per[a][k], 1));
      out.series.push_back(
          difference(algorithm_name(a), stat_name(base + "_diff", split), per[a][k], per[Algorithm::Greedier][k], 1));
      out.max_t = std::max(out.max_t, last_t(out.series.back()));
    }
  }
  return out;
}

std::vector<double> apd_by_ingredients(const SoupTrajectory& t, const Run& run, Split split) {
  std::vector<double> out;
  const auto states = t.accepted_states();
  for (std::size_t k = 1; k < states.size(); ++k) out.push_back(apd_of(run, states[k]->ingredients, split));
  return out;
}

std::vector<ApdQuantile> greedier_apd_quantiles(const SoupTrajectory& t, const Run& run, Split split,
                                                std::size_t run_index) {
  std::vector<ApdQuantile> out;
  if (t.algorithm != Algorithm::Greedier) return out;
  const WaState* prev = &t.initial;
  for (const auto& it : t.iterations) {
    if (!it.selected_id) continue;
    std::vector<double> apds;
    std::size_t index = 0;
    for (const auto& e : it.evals) {
      auto ids = prev->ingredients;
      ids.push_back(e.candidate_id);
      if (e.candidate_id == *it.selected_id) index = apds.size();
      apds.push_back(apd_of(run, ids, split));
    }
    out.push_back({it.t, mid_rank(apds, index) / static_cast<double>(apds.size()), apds.size(), run_index});
    prev = &it.wa_after;
  }
  return out;
}

SeriesBundle apd_series(const std::vector<Run>& runs, Split split) {
  const auto algos = common_algorithms(runs);
  SeriesBundle out;
  for (Algorithm a : algos) {
    std::vector<std::vector<double>> v;
    for (const auto& r : runs) v.push_back(apd_by_ingredients(r.trajectories.at(a), r, split));
    out.series.push_back(aggregate(algorithm_name(a), stat_name("apd", split), v, 2));
    out.max_t = std::max(out.max_t, last_t(out.series.back()));
  }
  return out;
}

AnalysisReport analyze(const std::vector<Run>& runs, const std::string& config_hash) {
  if (runs.empty()) throw DataError("nothing to analyze: no runs");
  AnalysisReport rep;
  rep.config_hash = config_hash;
  rep.series = benchmark_difference_series(runs);
  for (Split s : {Split::IdVal, Split::OodTest}) append(rep.series, error_dynamics_series(runs, s));
  append(rep.series, apd_series(runs, Split::IdVal));
  for (DistanceKind k : {DistanceKind::Diversity, DistanceKind::Euclidean}) {
    rep.quantiles[k] = selection_quantile_series(runs, k);
    rep.distance_bins[k] = selection_distance_series(rep.quantiles[k]);
  }
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto q = greedier_apd_quantiles(runs[r].trajectories.at(Algorithm::Greedier), runs[r], Split::IdVal, r);
    rep.apd_quantiles.insert(rep.apd_quantiles.end(), q.begin(), q.end());
  }
  if (runs.size() == 1) rep.notes.push_back("single run: confidence half-widths are 0 (n=1)");
  std::size_t missing = 0;
  for (const auto& s : rep.series.series) {
    for (const auto& sm : s.summary) missing += sm.missing;
  }
  if (missing > 0) rep.notes.push_back(std::to_string(missing) + " missing values excluded from means");
  return rep;
}

void write_series_csv(const SeriesBundle& bundle, const std::string& config_hash, std::ostream& out) {
  out << "# config " << config_hash << "\n";
  out << "algorithm,statistic,t,mean,ci_lo,ci_hi,n\n";
  for (const auto& s : bundle.series) {
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      const auto& m = s.summary[i];
      out << s.algorithm << ',' << s.statistic << ',' << s.t[i] << ',' << fmt(m.mean) << ',' << fmt(m.ci_lo()) << ','
          << fmt(m.ci_hi()) << ',' << m.n << '\n';
    }
  }
}

json to_json(const AnalysisReport& report) {
  json series = json::array();
  for (const auto& s : report.series.series) {
    json pts = json::array();
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      json vals = json::array();
      for (double v : s.values[i]) vals.push_back(num(v));
      const auto& m = s.summary[i];
      pts.push_back({{"t", s.t[i]},
                     {"mean", num(m.mean)},
                     {"half_width", num(m.half_width)},
                     {"n", m.n},
                     {"missing", m.missing},
                     {"values", vals},
                     {"carried", s.carried[i]}});
    }
    series.push_back({{"algorithm", s.algorithm}, {"statistic", s.statistic}, {"points", pts}});
  }
  json quant = json::object();
  for (const auto& [k, recs] : report.quantiles) {
    json arr = json::array();
    for (const auto& q : recs) {
      arr.push_back({{"run", q.run},
                     {"algorithm", algorithm_name(q.algorithm)},
                     {"t", q.t},
                     {"quantile", q.quantile},
                     {"distance", num(q.distance)},
                     {"num_remaining", q.num_remaining}});
    }
    quant[kind_name(k)] = arr;
  }
  json apdq = json::array();
  for (const auto& q : report.apd_quantiles)
    apdq.push_back({{"run", q.run}, {"t", q.t}, {"quantile", q.quantile}, {"candidates", q.candidates}});
  return {{"schema_version", kAnalysisSchemaVersion},
          {"config_hash", report.config_hash}, {"max_t", report.series.max_t}, {"series", series},
          {"selection_quantiles", quant},      {"greedier_apd_quantiles", apdq}, {"notes", report.notes}};
}

namespace {

double from_num(const json& j) {
  if (j.is_null()) return kMissing;
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw DataError("analysis: unexpected number string '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

AnalysisReport report_from_json(const json& j) {
  if (!j.is_object() || !j.contains("schema_version")) throw DataError("analysis: not an analysis document");
  const int v = j.at("schema_version").get<int>();
  if (v != kAnalysisSchemaVersion)
    throw SchemaError("analysis schema version " + std::to_string(v) + " (expected " +
                      std::to_string(kAnalysisSchemaVersion) + ")");
  try {
    AnalysisReport r;
    r.config_hash = j.at("config_hash").get<std::string>();
    r.series.max_t = j.at("max_t").get<int>();
    for (const auto& sj : j.at("series")) {
      Series s;
      s.algorithm = sj.at("algorithm").get<std::string>();
      s.statistic = sj.at("statistic").get<std::string>();
      for (const auto& p : sj.at("points")) {
        s.t.push_back(p.at("t").get<int>());
        std::vector<double> vals;
        for (const auto& x : p.at("values")) vals.push_back(from_num(x));
        s.values.push_back(std::move(vals));
        s.carried.push_back(p.at("carried").get<std::vector<bool>>());
        Summary m;
        m.mean = from_num(p.at("mean"));
        m.half_width = from_num(p.at("half_width"));
        m.n = p.at("n").get<std::size_t>();
        m.missing = p.at("missing").get<std::size_t>();
        s.summary.push_back(m);
      }
      r.series.series.push_back(std::move(s));
    }
    for (const auto& [k, arr] : j.at("selection_quantiles").items()) {
      const DistanceKind kind = parse_kind(k);
      auto& recs = r.quantiles[kind];
      for (const auto& q : arr) {
        QuantileRecord rec;
        rec.run = q.at("run").get<std::size_t>();
        rec.algorithm = parse_algorithm(q.at("algorithm").get<std::string>());
        rec.kind = kind;
        rec.t = q.at("t").get<int>();
        rec.quantile = q.at("quantile").get<double>();
        rec.distance = from_num(q.at("distance"));
        rec.num_remaining = q.at("num_remaining").get<std::size_t>();
        recs.push_back(rec);
      }
      r.distance_bins[kind] = selection_distance_series(recs);
    }
    for (const auto& q : j.at("greedier_apd_quantiles")) {
      r.apd_quantiles.push_back({q.at("t").get<int>(), q.at("quantile").get<double>(),
                                 q.at("candidates").get<std::size_t>(), q.at("run").get<std::size_t>()});
    }
    r.notes = j.at("notes").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("analysis: malformed document: ") + e.what());
  }
}

void write_report(const AnalysisReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw DataError("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("series.csv");
    write_series_csv(report.series, report.config_hash, f);
  }
  {
    auto f = open("quantiles.csv");
    f << "# config " << report.config_hash << "\nrun,algorithm,kind,t,quantile,distance,num_remaining\n";
    for (const auto& [k, recs] : report.quantiles) {
      for (const auto& q : recs) {
        f << q.run << ',' << algorithm_name(q.algorithm) << ',' << kind_name(k) << ',' << q.t << ',' << fmt(q.quantile)
          << ',' << fmt(q.distance) << ',' << q.num_remaining << '\n';
      }
    }
  }
  {
    auto f = open("distance_bins.csv");
    f << "# config " << report.config_hash << "\nalgorithm,kind,t,n,infinite,mean_finite,q1,median,q3\n";
    for (const auto& [k, bins] : report.distance_bins) {
      for (const auto& b : bins) {
        f << algorithm_name(b.algorithm) << ',' << kind_name(k) << ',' << b.t << ',' << b.values.size() << ','
          << b.infinite << ',' << fmt(b.mean_finite) << ',' << fmt(b.q1) << ',' << fmt(b.median) << ',' << fmt(b.q3)
          << '\n';
      }
    }
  }
  {
    auto f = open("apd_quantiles.csv");
    f << "# config " << report.config_hash << "\nrun,t,quantile,candidates\n";
    for (const auto& q : report.apd_quantiles) f << q.run << ',' << q.t << ',' << fmt(q.quantile) << ',' << q.candidates << '\n';
  }
  {
    auto f = open("analysis.json");
    f << to_json(report).dump(1) << '\n';
  }
}

}  // namespace soup
