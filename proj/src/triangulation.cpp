#include <algorithm>
#include <cmath>
#include <map>

#include "soup/error.hpp"
#include "soup/mds.hpp"

namespace soup {

namespace {

using Tri = std::array<int, 3>;
using Edge = std::pair<int, int>;

Edge undirected(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

Tri ccw(const std::vector<Point2>& p, int a, int b, int c) {
  return signed_area(p[a], p[b], p[c]) >= 0.0 ? Tri{a, b, c} : Tri{a, c, b};
}

// Separates coincident points; returns the nudged copy.
std::vector<Point2> separate(std::vector<Point2> p, double span) {
  std::map<Point2, int> seen;
  const double eps = 1e-9 * span;
  for (auto& q : p) {
    int& k = seen[q];
    if (k > 0) {
      q[0] += eps * k;
      q[1] += eps * 0.5 * k;
    }
    ++k;
  }
  return p;
}

std::vector<Tri> bowyer_watson(std::vector<Point2>& pts, double span, Point2 mid) {
  const int n = static_cast<int>(pts.size());
  const double m = 1e3 * span;
  pts.push_back({mid[0] - 2 * m, mid[1] - m});
  pts.push_back({mid[0] + 2 * m, mid[1] - m});
  pts.push_back({mid[0], mid[1] + 2 * m});
  std::vector<Tri> tris{ccw(pts, n, n + 1, n + 2)};
  for (int i = 0; i < n; ++i) {
    std::vector<Tri> keep;
    std::map<Edge, std::pair<int, int>> directed;
    std::map<Edge, int> count;
    for (const Tri& t : tris) {
      if (in_circle(pts[t[0]], pts[t[1]], pts[t[2]], pts[i]) > 0.0) {
        for (int k = 0; k < 3; ++k) {
          const int a = t[k], b = t[(k + 1) % 3];
          const Edge e = undirected(a, b);
          ++count[e];
          directed[e] = {a, b};
        }
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [e, c] : count) {
      if (c != 1) continue;
      const auto [a, b] = directed[e];
      keep.push_back(ccw(pts, a, b, i));
    }
    tris = std::move(keep);
  }
  std::vector<Tri> out;
  for (const Tri& t : tris) {
    if (t[0] < n && t[1] < n && t[2] < n) out.push_back(t);
  }
  pts.resize(static_cast<std::size_t>(n));
  return out;
}

// Boundary edges of a triangle set, directed as they appear in their CCW
// triangle.
std::map<int, int> boundary_next(const std::vector<Tri>& tris) {
  std::map<Edge, int> count;
  for (const Tri& t : tris)
    for (int k = 0; k < 3; ++k) ++count[undirected(t[k], t[(k + 1) % 3])];
  std::map<int, int> next;
  for (const Tri& t : tris) {
    for (int k = 0; k < 3; ++k) {
      if (count[undirected(t[k], t[(k + 1) % 3])] == 1) next[t[k]] = t[(k + 1) % 3];
    }
  }
  return next;
}

bool inside_or_on(const std::vector<Point2>& p, const Tri& t, int q) {
  return signed_area(p[t[0]], p[t[1]], p[q]) >= 0 && signed_area(p[t[1]], p[t[2]], p[q]) >= 0 &&
         signed_area(p[t[2]], p[t[0]], p[q]) >= 0;
}

// Fills concave pockets between the triangulated region and the convex hull.
void fill_pockets(const std::vector<Point2>& p, std::vector<Tri>& tris, double area_eps) {
  for (bool changed = true; changed;) {
    changed = false;
    const auto next = boundary_next(tris);
    std::map<int, int> prev;
    for (const auto& [a, b] : next) prev[b] = a;
    for (const auto& [v, nx] : next) {
      const auto pit = prev.find(v);
      if (pit == prev.end()) continue;
      const int pv = pit->second;
      if (pv == nx) continue;
      // a right turn on a CCW boundary is a pocket
      if (signed_area(p[pv], p[v], p[nx]) >= -area_eps) continue;
      const Tri t{pv, nx, v};
      bool empty = true;
      for (int q = 0; q < static_cast<int>(p.size()) && empty; ++q) {
        if (q != pv && q != nx && q != v && inside_or_on(p, t, q)) empty = false;
      }
      if (!empty) continue;
      tris.push_back(t);
      changed = true;
      break;
    }
  }
}

// Lawson flips until every interior edge is locally Delaunay.
void legalize(const std::vector<Point2>& p, std::vector<Tri>& tris) {
  for (int round = 0; round < 10000; ++round) {
    std::map<Edge, std::vector<std::pair<int, int>>> owners;  // edge -> (triangle, opposite vertex)
    for (int ti = 0; ti < static_cast<int>(tris.size()); ++ti) {
      const Tri& t = tris[ti];
      for (int k = 0; k < 3; ++k) owners[undirected(t[k], t[(k + 1) % 3])].push_back({ti, t[(k + 2) % 3]});
    }
    bool flipped = false;
    for (const auto& [e, own] : owners) {
      if (own.size() != 2) continue;
      const Tri& t = tris[own[0].first];
      const int d = own[1].second;
      if (in_circle(p[t[0]], p[t[1]], p[t[2]], p[d]) <= 0.0) continue;
      const int c = own[0].second;
      const Tri a = ccw(p, c, d, e.first), b = ccw(p, c, d, e.second);
      if (signed_area(p[a[0]], p[a[1]], p[a[2]]) <= 0.0 || signed_area(p[b[0]], p[b[1]], p[b[2]]) <= 0.0) continue;
      tris[own[0].first] = a;
      tris[own[1].first] = b;
      flipped = true;
      break;
    }
    if (!flipped) return;
  }
}

}  // namespace

double signed_area(const Point2& a, const Point2& b, const Point2& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

double in_circle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const double adx = a[0] - d[0], ady = a[1] - d[1];
  const double bdx = b[0] - d[0], bdy = b[1] - d[1];
  const double cdx = c[0] - d[0], cdy = c[1] - d[1];
  const double det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) - (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady) +
                     (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
  // relative tolerance against rounding on (near) co-circular points
  const double mag = (adx * adx + ady * ady) * (std::abs(bdx * cdy) + std::abs(cdx * bdy)) +
                     (bdx * bdx + bdy * bdy) * (std::abs(adx * cdy) + std::abs(cdx * ady)) +
                     (cdx * cdx + cdy * cdy) * (std::abs(adx * bdy) + std::abs(bdx * ady));
  return det > 1e-12 * mag ? det : (det < -1e-12 * mag ? det : 0.0);
}

Triangulation triangulate(const std::vector<Point2>& points, const std::vector<double>& values) {
  if (points.size() != values.size()) throw std::invalid_argument("triangulate: one value per point required");
  if (points.size() < 3) throw DataError("degenerate configuration: fewer than 3 points");
  double lo_x = points[0][0], hi_x = lo_x, lo_y = points[0][1], hi_y = lo_y;
  for (const auto& p : points) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) throw DataError("triangulate: non-finite coordinates");
    lo_x = std::min(lo_x, p[0]), hi_x = std::max(hi_x, p[0]);
    lo_y = std::min(lo_y, p[1]), hi_y = std::max(hi_y, p[1]);
  }
  const double span = std::max(hi_x - lo_x, hi_y - lo_y);
  if (span <= 0.0) throw DataError("degenerate configuration: all points coincide");
  Triangulation tri;
  tri.points = separate(points, span);
  tri.values = values;

  const double area_eps = 1e-12 * span * span;
  bool collinear = true;
  for (std::size_t k = 2; k < tri.points.size() && collinear; ++k) {
    for (std::size_t j = 1; j < k && collinear; ++j) {
      if (std::abs(signed_area(tri.points[0], tri.points[j], tri.points[k])) > area_eps) collinear = false;
    }
  }
  if (collinear) throw DataError("degenerate configuration: points are collinear");

  auto pts = tri.points;
  tri.triangles = bowyer_watson(pts, span, {(lo_x + hi_x) / 2, (lo_y + hi_y) / 2});
  fill_pockets(tri.points, tri.triangles, area_eps);
  legalize(tri.points, tri.triangles);
  std::erase_if(tri.triangles, [&](const Tri& t) {
    return signed_area(tri.points[t[0]], tri.points[t[1]], tri.points[t[2]]) <= 0.0;
  });
  std::sort(tri.triangles.begin(), tri.triangles.end());
  return tri;
}

double interpolate(const Triangulation& tri, std::size_t k, const Point2& p) {
  const Tri& t = tri.triangles.at(k);
  const Point2 &a = tri.points[t[0]], &b = tri.points[t[1]], &c = tri.points[t[2]];
  const double area = signed_area(a, b, c);
  const double wa = signed_area(p, b, c) / area;
  const double wb = signed_area(a, p, c) / area;
  const double wc = 1.0 - wa - wb;
  return wa * tri.values[t[0]] + wb * tri.values[t[1]] + wc * tri.values[t[2]];
}

}  // namespace soup
