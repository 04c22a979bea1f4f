#include "soup/mds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "soup/parallel.hpp"
#include "soup/synth.hpp"

namespace soup {

namespace {

std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

double dist(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

void center(std::vector<Point2>& x) {
  Point2 m{0, 0};
  for (const auto& p : x) m[0] += p[0], m[1] += p[1];
  m[0] /= static_cast<double>(x.size());
  m[1] /= static_cast<double>(x.size());
  for (auto& p : x) p[0] -= m[0], p[1] -= m[1];
}

// Random start scaled so that the sum of squared pairwise distances equals
// `target_ss`.
std::vector<Point2> random_start(std::size_t n, std::uint64_t seed, double target_ss) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point2> x(n);
  for (auto& p : x) p = {u(rng), u(rng)};
  center(x);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) ss += std::pow(dist(x[i], x[j]), 2);
  if (ss > 0.0 && target_ss > 0.0) {
    const double s = std::sqrt(target_ss / ss);
    for (auto& p : x) p[0] *= s, p[1] *= s;
  }
  return x;
}

// X+ = (1/n) B(X) X for unit weights.
std::vector<Point2> guttman(const std::vector<Point2>& x, const SquareMatrix& target) {
  const std::size_t n = x.size();
  std::vector<Point2> out(n, Point2{0, 0});
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    Point2 acc{0, 0};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = dist(x[i], x[j]);
      const double b = d > 0.0 ? -target(i, j) / d : 0.0;
      diag -= b;
      acc[0] += b * x[j][0];
      acc[1] += b * x[j][1];
    }
    out[i][0] = (acc[0] + diag * x[i][0]) / static_cast<double>(n);
    out[i][1] = (acc[1] + diag * x[i][1]) / static_cast<double>(n);
  }
  return out;
}

bool increased(double now, double before, double scale) { return now > before * (1.0 + 1e-12) + 1e-15 * scale; }

struct PairOrder {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // ascending dissimilarity
  std::vector<std::size_t> block_end;                        // end index of each tie block
};

PairOrder order_pairs(const SquareMatrix& delta) {
  PairOrder po;
  const std::size_t n = delta.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) po.pairs.emplace_back(i, j);
  std::stable_sort(po.pairs.begin(), po.pairs.end(),
                   [&](const auto& a, const auto& b) { return delta(a.first, a.second) < delta(b.first, b.second); });
  for (std::size_t k = 0; k < po.pairs.size(); ++k) {
    const bool last = k + 1 == po.pairs.size() ||
                      delta(po.pairs[k].first, po.pairs[k].second) != delta(po.pairs[k + 1].first, po.pairs[k + 1].second);
    if (last) po.block_end.push_back(k + 1);
  }
  return po;
}

// Primary approach: inside a block of tied dissimilarities the pairs are
// ordered by current distance before the monotone fit.
SquareMatrix disparities(const std::vector<Point2>& x, const PairOrder& po) {
  const std::size_t n = x.size();
  auto pairs = po.pairs;
  std::size_t begin = 0;
  for (std::size_t end : po.block_end) {
    std::stable_sort(pairs.begin() + static_cast<std::ptrdiff_t>(begin), pairs.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](const auto& a, const auto& b) {
                       return dist(x[a.first], x[a.second]) < dist(x[b.first], x[b.second]);
                     });
    begin = end;
  }
  std::vector<double> d;
  d.reserve(pairs.size());
  for (const auto& [i, j] : pairs) d.push_back(dist(x[i], x[j]));
  auto fit = pava(d);
  double ss = 0.0;
  for (double v : fit) ss += v * v;
  const double s = ss > 0.0 ? std::sqrt(static_cast<double>(pair_count(n)) / ss) : 1.0;
  SquareMatrix out(n);
  for (std::size_t k = 0; k < pairs.size(); ++k) out.set(pairs[k].first, pairs[k].second, fit[k] * s);
  return out;
}

double stress1(const std::vector<Point2>& x, const SquareMatrix& dhat) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double d = dist(x[i], x[j]);
      num += (d - dhat(i, j)) * (d - dhat(i, j));
      den += d * d;
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

Embedding metric_once(const SquareMatrix& delta, const MdsOptions& opt, std::uint64_t seed) {
  Embedding e;
  e.kind = MdsKind::Metric;
  const std::size_t n = delta.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) scale += delta(i, j) * delta(i, j);
  e.points = random_start(n, seed, scale);
  double prev = raw_stress(e.points, delta);
  e.stress_history.push_back(prev);
  for (int it = 0; it < opt.max_iters; ++it) {
    e.points = guttman(e.points, delta);
    const double s = raw_stress(e.points, delta);
    e.stress_history.push_back(s);
    e.iterations_used = it + 1;
    if (increased(s, prev, scale)) ++e.monotonicity_violations;
    const bool done = s <= 1e-28 * std::max(scale, 1.0) || (prev > 0.0 && (prev - s) / prev < opt.tol);
    prev = s;
    if (done) {
      e.converged = true;
      break;
    }
  }
  e.stress = prev;
  return e;
}

Embedding nonmetric_once(const SquareMatrix& delta, const PairOrder& po, const MdsOptions& opt, std::uint64_t seed) {
  Embedding e;
  e.kind = MdsKind::NonMetric;
  const std::size_t n = delta.size();
  const double scale = static_cast<double>(pair_count(n));
  e.points = random_start(n, seed, scale);
  SquareMatrix dhat = disparities(e.points, po);
  double prev = raw_stress(e.points, dhat);
  e.stress_history.push_back(prev);
  for (int it = 0; it < opt.max_iters; ++it) {
    e.points = guttman(e.points, dhat);
    const double after_move = raw_stress(e.points, dhat);
    dhat = disparities(e.points, po);
    const double after_fit = raw_stress(e.points, dhat);
    e.stress_history.push_back(after_move);
    e.stress_history.push_back(after_fit);
    if (increased(after_move, prev, scale)) ++e.monotonicity_violations;
    if (increased(after_fit, after_move, scale)) ++e.monotonicity_violations;
    e.iterations_used = it + 1;
    const bool done = after_fit <= 1e-28 * scale || (prev > 0.0 && (prev - after_fit) / prev < opt.tol);
    prev = after_fit;
    if (done) {
      e.converged = true;
      break;
    }
  }
  e.stress = stress1(e.points, dhat);
  return e;
}

template <typename Once>
Embedding best_of(const SquareMatrix& delta, const MdsOptions& opt, MdsKind kind, Once once) {
  validate_dissimilarities(delta);
  const std::size_t n = delta.size();
  Embedding trivial;
  trivial.kind = kind;
  trivial.converged = true;
  if (n == 0) return trivial;
  if (n == 1) {
    trivial.points = {Point2{0, 0}};
    return trivial;
  }
  if (n == 2) {
    // two points always embed exactly
    trivial.points = {Point2{-delta(0, 1) / 2.0, 0}, Point2{delta(0, 1) / 2.0, 0}};
    return trivial;
  }
  const std::size_t restarts = static_cast<std::size_t>(std::max(1, opt.restarts));
  std::vector<Embedding> runs(restarts);
  parallel_for(restarts, opt.jobs, [&](std::size_t r) { runs[r] = once(derive_seed(opt.seed, 0x3d5, r)); });
  std::size_t best = 0;
  std::size_t violations = 0;
  for (std::size_t r = 0; r < restarts; ++r) {
    violations += runs[r].monotonicity_violations;
    if (runs[r].stress < runs[best].stress) best = r;
  }
  Embedding out = std::move(runs[best]);
  out.restart = static_cast<int>(best);
  out.monotonicity_violations = violations;
  return out;
}

}  // namespace

const char* mds_kind_name(MdsKind k) { return k == MdsKind::Metric ? "metric" : "nonmetric"; }

SquareMatrix replace_infinite(SquareMatrix d) {
  double max_finite = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j)
      if (i != j && std::isfinite(d(i, j))) max_finite = std::max(max_finite, d(i, j)), any = true;
  const double sub = any && max_finite > 0.0 ? 1.5 * max_finite : 1.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j)
      if (std::isinf(d(i, j))) d.at(i, j) = sub;
  return d;
}

SquareMatrix mds_input(const DistanceMatrix& d) {
  SquareMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      const double v = d(i, j);
      m.at(i, j) = d.kind() == DistanceKind::Euclidean ? std::sqrt(v) : v;
    }
  }
  return d.kind() == DistanceKind::Diversity ? replace_infinite(std::move(m)) : m;
}

void validate_dissimilarities(const SquareMatrix& d) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d(i, i) != 0.0) throw std::invalid_argument("dissimilarity matrix has a non-zero diagonal");
    for (std::size_t j = 0; j < d.size(); ++j) {
      const double v = d(i, j);
      if (!std::isfinite(v)) throw std::invalid_argument("dissimilarity matrix has non-finite entries");
      if (v < 0.0) throw std::invalid_argument("dissimilarity matrix has negative entries");
      if (v != d(j, i)) throw std::invalid_argument("dissimilarity matrix is not symmetric");
    }
  }
}

double raw_stress(const std::vector<Point2>& x, const SquareMatrix& target) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double r = dist(x[i], x[j]) - target(i, j);
      s += r * r;
    }
  }
  return s;
}

SquareMatrix embedded_distances(const std::vector<Point2>& x) {
  SquareMatrix m(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) m.set(i, j, dist(x[i], x[j]));
  return m;
}

Embedding smacof_metric(const SquareMatrix& delta, const MdsOptions& opt) {
  return best_of(delta, opt, MdsKind::Metric, [&](std::uint64_t seed) { return metric_once(delta, opt, seed); });
}

Embedding smacof_nonmetric(const SquareMatrix& delta, const MdsOptions& opt) {
  validate_dissimilarities(delta);
  const PairOrder po = order_pairs(delta);
  return best_of(delta, opt, MdsKind::NonMetric,
                 [&](std::uint64_t seed) { return nonmetric_once(delta, po, opt, seed); });
}

Embedding run_mds(MdsKind kind, const SquareMatrix& delta, const MdsOptions& opt) {
  return kind == MdsKind::Metric ? smacof_metric(delta, opt) : smacof_nonmetric(delta, opt);
}

std::vector<double> pava(const std::vector<double>& values, const std::vector<double>& weights) {
  if (values.size() != weights.size()) throw std::invalid_argument("pava: values and weights differ in length");
  struct Block {
    double wsum, wvsum;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] > 0.0)) throw std::invalid_argument("pava: weights must be positive");
    blocks.push_back({weights[i], weights[i] * values[i], 1});
    while (blocks.size() > 1) {
      const Block& b = blocks.back();
      const Block& a = blocks[blocks.size() - 2];
      if (a.wvsum / a.wsum <= b.wvsum / b.wsum) break;
      const Block merged{a.wsum + b.wsum, a.wvsum + b.wvsum, a.count + b.count};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.wvsum / b.wsum);
  return out;
}

std::vector<double> pava(const std::vector<double>& values) {
  return pava(values, std::vector<double>(values.size(), 1.0));
}

void write_embedding_csv(const Embedding& e, const std::vector<EmbeddedPoint>& meta, const std::string& config_hash,
                         std::ostream& out) {
  if (meta.size() != e.points.size()) throw std::invalid_argument("embedding metadata does not match the point count");
  out << "# config " << config_hash << "\n";
  out << "id,x,y,accuracy,role\n";
  char buf[128];
  for (std::size_t i = 0; i < meta.size(); ++i) {
    std::snprintf(buf, sizeof buf, ",%.12g,%.12g,%.12g,", e.points[i][0], e.points[i][1], meta[i].accuracy);
    out << meta[i].id << buf << meta[i].role << "\n";
  }
}

}  // namespace soup
