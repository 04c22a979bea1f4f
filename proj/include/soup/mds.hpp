#pragma once

// Two-dimensional multidimensional scaling by SMACOF (iterative majorization
// with Guttman transforms), a pool-adjacent-violators isotonic regression for
// the non-metric variant, and a Delaunay triangulation of the embedded
// points for interpolated backdrops.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "soup/metrics.hpp"

namespace soup {

// Dense symmetric n x n matrix of dissimilarities.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), v_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return v_[i * n_ + j]; }
  double& at(std::size_t i, std::size_t j) { return v_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double x) { v_[i * n_ + j] = v_[j * n_ + i] = x; }

 private:
  std::size_t n_ = 0;
  std::vector<double> v_;
};

// Dissimilarities ready for MDS: square roots of squared Euclidean distances;
// diversity with +inf replaced by 1.5 x the largest finite entry.
SquareMatrix mds_input(const DistanceMatrix& d);

// Replaces +inf by 1.5 x the largest finite off-diagonal entry (1 if none).
SquareMatrix replace_infinite(SquareMatrix d);

using Point2 = std::array<double, 2>;

enum class MdsKind { Metric, NonMetric };
const char* mds_kind_name(MdsKind k);

struct MdsOptions {
  int max_iters = 500;
  double tol = 1e-10;  // relative stress decrease that counts as converged
  std::uint64_t seed = 1;
  int restarts = 4;
  int jobs = 1;
};

struct Embedding {
  MdsKind kind = MdsKind::Metric;
  std::vector<Point2> points;
  double stress = 0.0;  // raw stress (metric) or stress-1 (non-metric)
  int iterations_used = 0;
  bool converged = false;
  int restart = 0;  // index of the restart that was kept
  // Majorized objective after every half-step of the kept restart.
  std::vector<double> stress_history;
  // Increases of the majorized objective beyond rounding, over all restarts.
  std::size_t monotonicity_violations = 0;
};

// Throws std::invalid_argument on an asymmetric, negative, non-finite or
// non-zero-diagonal input.
void validate_dissimilarities(const SquareMatrix& d);

// Minimizes raw stress sum_{i<j} (d_ij(X) - delta_ij)^2.
Embedding smacof_metric(const SquareMatrix& delta, const MdsOptions& opt = {});

// Kruskal non-metric MDS with the primary approach to ties. Disparities are
// refitted by isotonic regression after every Guttman step and normalized to
// sum of squares n(n-1)/2. Reports stress-1.
Embedding smacof_nonmetric(const SquareMatrix& delta, const MdsOptions& opt = {});

Embedding run_mds(MdsKind kind, const SquareMatrix& delta, const MdsOptions& opt = {});

// Raw stress of a configuration against fixed targets.
double raw_stress(const std::vector<Point2>& x, const SquareMatrix& target);
SquareMatrix embedded_distances(const std::vector<Point2>& x);

// Weighted least-squares non-decreasing fit. Throws std::invalid_argument on
// a length mismatch or a non-positive weight.
std::vector<double> pava(const std::vector<double>& values, const std::vector<double>& weights);
std::vector<double> pava(const std::vector<double>& values);

struct Triangulation {
  std::vector<Point2> points;  // possibly nudged copies of the input
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<double> values;                 // one per point
};

// Bowyer-Watson Delaunay triangulation covering the convex hull. Coincident
// points are separated by a deterministic nudge of 1e-9 x the bounding-box
// size. Throws DataError("degenerate configuration") when fewer than 3
// points or all points are collinear.
Triangulation triangulate(const std::vector<Point2>& points, const std::vector<double>& values);

// Barycentric interpolation inside triangle k.
double interpolate(const Triangulation& tri, std::size_t k, const Point2& p);

double signed_area(const Point2& a, const Point2& b, const Point2& c);
// > 0 when d lies strictly inside the circumcircle of counter-clockwise abc.
double in_circle(const Point2& a, const Point2& b, const Point2& c, const Point2& d);

struct EmbeddedPoint {
  std::string id;
  std::string role;  // ingredient, candidate-WA, current-WA, past-WA
  double accuracy = 0.0;
};

// Header "id,x,y,accuracy,role" after a "# config <hash>" line.
void write_embedding_csv(const Embedding& e, const std::vector<EmbeddedPoint>& meta, const std::string& config_hash,
                         std::ostream& out);

}  // namespace soup
