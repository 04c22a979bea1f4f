#include "soup/viz.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace soup {

namespace {

using Pts = std::vector<std::pair<double, double>>;

void header(svg::Writer& w, const PlotSpec& spec, double width) {
  if (!spec.config_hash.empty()) w.element("desc", "config " + spec.config_hash);
  w.text(width / 2, 20, spec.title, "text-anchor=\"middle\" font-size=\"14\"");
}

void axes(svg::Writer& w, const PanelGeometry& p, const PlotSpec& spec, const std::string& panel_title,
          bool integer_x) {
  w.rect(p.left, p.top, p.width, p.height, "fill=\"none\" stroke=\"#333\" class=\"frame\"");
  for (int k = 0; k <= 4; ++k) {
    const double v = p.y.data_lo() + (p.y.data_hi() - p.y.data_lo()) * k / 4.0;
    const double py = p.y.to_px(v);
    w.line(p.left - 4, py, p.left, py, "stroke=\"#333\"");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    w.text(p.left - 6, py + 4, buf, "text-anchor=\"end\"");
  }
  const double lo = p.x.data_lo(), hi = p.x.data_hi();
  if (integer_x) {
    const int first = static_cast<int>(std::ceil(lo)), last = static_cast<int>(std::floor(hi));
    const int step = std::max(1, (last - first) / 10 + 1);
    for (int t = first; t <= last; t += step) {
      const double px = p.x.to_px(t);
      w.line(px, p.top + p.height, px, p.top + p.height + 4, "stroke=\"#333\"");
      w.text(px, p.top + p.height + 16, std::to_string(t), "text-anchor=\"middle\"");
    }
  }
  w.text(p.left + p.width / 2, p.top + p.height + 34, spec.x_label, "text-anchor=\"middle\"");
  w.text(p.left + p.width / 2, p.top - 8, panel_title, "text-anchor=\"middle\"");
  const std::string rot = "transform=\"rotate(-90 " + svg::num(p.left - 46) + ' ' + svg::num(p.top + p.height / 2) +
                          ")\" text-anchor=\"middle\"";
  w.text(p.left - 46, p.top + p.height / 2, spec.y_label, rot);
  for (double r : spec.reference_lines) {
    if (r < p.y.data_lo() || r > p.y.data_hi()) continue;
    const double py = p.y.to_px(r);
    w.line(p.left, py, p.left + p.width, py, "stroke=\"#d62728\" stroke-dasharray=\"6,4\" class=\"reference\"");
  }
}

void legend(svg::Writer& w, const std::vector<std::string>& algos, double x, double y) {
  for (std::size_t i = 0; i < algos.size(); ++i) {
    const double yy = y + 14.0 * static_cast<double>(i);
    w.rect(x, yy - 8, 10, 10, "fill=\"" + algorithm_color(algos[i]) + "\"");
    w.text(x + 14, yy + 1, algos[i]);
  }
}

PanelGeometry panel_at(std::size_t index, const PlotSpec& spec, std::pair<double, double> xr,
                       std::pair<double, double> yr) {
  PanelGeometry p;
  p.left = kMarginLeft + static_cast<double>(index) * (spec.panel_width + kPanelGap + kMarginLeft / 2);
  p.top = kMarginTop;
  p.width = spec.panel_width;
  p.height = spec.panel_height;
  p.x = svg::AxisMap(xr.first, xr.second, p.left, p.left + p.width);
  p.y = svg::AxisMap(yr.first, yr.second, p.top + p.height, p.top);
  return p;
}

std::string blue_ramp(double v) {
  if (!std::isfinite(v)) v = 0.0;
  v = std::clamp(v, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(239 - v * (239 - 33)));
  const int g = static_cast<int>(std::lround(243 - v * (243 - 102)));
  const int b = static_cast<int>(std::lround(255 - v * (255 - 172)));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::pair<double, double> padded_range(double lo, double hi) {
  const double span = hi - lo;
  const double pad = span > 0.0 ? 0.05 * span : std::max(0.05 * std::abs(lo), 0.01);
  return {lo - pad, hi + pad};
}

std::string algorithm_color(const std::string& algorithm) {
  static const std::map<std::string, std::string> palette{{"greedy", "#1f77b4"},
                                                          {"greedier", "#d62728"},
                                                          {"ranked-diversity", "#2ca02c"},
                                                          {"ranked-euclidean", "#9467bd"}};
  const auto it = palette.find(algorithm);
  return it == palette.end() ? "#7f7f7f" : it->second;
}

Figure render_ci_lines(const SeriesBundle& bundle, const std::string& statistic, const PlotSpec& spec) {
  const std::string names[2] = {statistic + "/id_val", statistic + "/ood_test"};
  std::vector<const Series*> panels[2];
  double t_lo = INFINITY, t_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (int k = 0; k < 2; ++k) {
    for (const auto& s : bundle.series) {
      if (s.statistic != names[k] || s.t.empty()) continue;
      panels[k].push_back(&s);
      for (std::size_t i = 0; i < s.t.size(); ++i) {
        const auto& m = s.summary[i];
        if (!std::isfinite(m.mean)) continue;
        t_lo = std::min(t_lo, double(s.t[i])), t_hi = std::max(t_hi, double(s.t[i]));
        y_lo = std::min(y_lo, m.ci_lo()), y_hi = std::max(y_hi, m.ci_hi());
      }
    }
  }
  if (!std::isfinite(t_lo)) throw std::invalid_argument("nothing to plot for statistic '" + statistic + "'");
  for (double r : spec.reference_lines) y_lo = std::min(y_lo, r), y_hi = std::max(y_hi, r);
  const auto yr = spec.y_range ? *spec.y_range : padded_range(y_lo, y_hi);
  const auto xr = t_hi > t_lo ? std::pair{t_lo, t_hi} : std::pair{t_lo - 0.5, t_hi + 0.5};

  Figure fig;
  const double width = kMarginLeft + 2 * spec.panel_width + kPanelGap + kMarginLeft / 2 + kMarginRight + 130;
  const double height = kMarginTop + spec.panel_height + kMarginBottom;
  svg::Writer w(width, height);
  header(w, spec, width);
  std::vector<std::string> algos;
  for (int k = 0; k < 2; ++k) {
    const PanelGeometry p = panel_at(static_cast<std::size_t>(k), spec, xr, yr);
    fig.panels.push_back(p);
    w.open("g", std::string("class=\"panel\" id=\"panel-") + (k == 0 ? "id" : "ood") + "\"");
    axes(w, p, spec, k == 0 ? "ID validation" : "OOD test", true);
    for (const Series* s : panels[k]) {
      if (std::find(algos.begin(), algos.end(), s->algorithm) == algos.end()) algos.push_back(s->algorithm);
      const std::string color = algorithm_color(s->algorithm);
      Pts upper, lower, mid;
      for (std::size_t i = 0; i < s->t.size(); ++i) {
        const auto& m = s->summary[i];
        if (!std::isfinite(m.mean)) continue;
        const double px = p.x.to_px(s->t[i]);
        mid.emplace_back(px, p.y.to_px(m.mean));
        upper.emplace_back(px, p.y.to_px(m.ci_hi()));
        lower.emplace_back(px, p.y.to_px(m.ci_lo()));
      }
      Pts ribbon(upper);
      ribbon.insert(ribbon.end(), lower.rbegin(), lower.rend());
      w.polygon(ribbon, "fill=\"" + color + "\" fill-opacity=\"0.2\" stroke=\"none\" class=\"ribbon " + s->algorithm + "\"");
      w.polyline(mid, "fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.8\" class=\"series " + s->algorithm + "\"");
    }
    w.close("g");
  }
  legend(w, algos, width - kMarginRight - 120, kMarginTop + 10);
  fig.svg = w.finish();
  return fig;
}

std::vector<BoxGroup> quantile_groups(const std::vector<QuantileRecord>& records) {
  std::map<std::pair<std::string, int>, std::vector<double>> m;
  for (const auto& q : records) m[{algorithm_name(q.algorithm), q.t}].push_back(q.quantile);
  std::vector<BoxGroup> out;
  for (auto& [k, v] : m) out.push_back({k.first, k.second, std::move(v)});
  return out;
}

std::vector<BoxGroup> distance_groups(const std::vector<DistanceBin>& bins) {
  std::vector<BoxGroup> out;
  for (const auto& b : bins) {
    std::vector<double> finite;
    for (double v : b.values) {
      if (std::isfinite(v)) finite.push_back(v);
    }
    out.push_back({algorithm_name(b.algorithm), b.t, std::move(finite)});
  }
  return out;
}

Figure render_boxplots(const std::vector<BoxGroup>& groups, const PlotSpec& spec) {
  Figure fig;
  std::vector<std::string> algos;
  std::vector<std::pair<const BoxGroup*, BoxStats>> boxes;
  double t_lo = INFINITY, t_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& g : groups) {
    BoxStats b = box_stats(g.values);
    if (b.n == 0) {
      fig.notes.push_back("empty bin omitted: " + g.algorithm + " t=" + std::to_string(g.t));
      continue;
    }
    if (std::find(algos.begin(), algos.end(), g.algorithm) == algos.end()) algos.push_back(g.algorithm);
    t_lo = std::min(t_lo, double(g.t)), t_hi = std::max(t_hi, double(g.t));
    y_lo = std::min(y_lo, b.whisker_lo), y_hi = std::max(y_hi, b.whisker_hi);
    for (double o : b.outliers) y_lo = std::min(y_lo, o), y_hi = std::max(y_hi, o);
    boxes.emplace_back(&g, std::move(b));
  }
  if (boxes.empty()) throw std::invalid_argument("no non-empty bins to plot");
  std::sort(algos.begin(), algos.end());
  for (double r : spec.reference_lines) y_lo = std::min(y_lo, r), y_hi = std::max(y_hi, r);
  const auto yr = spec.y_range ? *spec.y_range : padded_range(y_lo, y_hi);
  const double width = kMarginLeft + spec.panel_width + kMarginRight + 130;
  const double height = kMarginTop + spec.panel_height + kMarginBottom;
  svg::Writer w(width, height);
  header(w, spec, width);
  const PanelGeometry p = panel_at(0, spec, {t_lo - 0.5, t_hi + 0.5}, yr);
  fig.panels.push_back(p);
  w.open("g", "class=\"panel\" id=\"panel-box\"");
  axes(w, p, spec, "", true);
  const double slot = 0.8 / static_cast<double>(algos.size());
  for (const auto& [g, b] : boxes) {
    const auto ai = static_cast<double>(std::find(algos.begin(), algos.end(), g->algorithm) - algos.begin());
    const double x0 = g->t - 0.4 + ai * slot + 0.1 * slot, x1 = x0 + 0.8 * slot, xm = (x0 + x1) / 2;
    const double px0 = p.x.to_px(x0), px1 = p.x.to_px(x1), pxm = p.x.to_px(xm);
    const std::string color = algorithm_color(g->algorithm);
    const std::string cls = " " + g->algorithm + " t" + std::to_string(g->t);
    w.open("g", "class=\"boxgroup" + cls + "\"");
    w.line(pxm, p.y.to_px(b.whisker_lo), pxm, p.y.to_px(b.q1), "stroke=\"" + color + "\" class=\"whisker\"");
    w.line(pxm, p.y.to_px(b.q3), pxm, p.y.to_px(b.whisker_hi), "stroke=\"" + color + "\" class=\"whisker\"");
    w.rect(px0, p.y.to_px(b.q3), px1 - px0, p.y.to_px(b.q1) - p.y.to_px(b.q3),
           "fill=\"" + color + "\" fill-opacity=\"0.3\" stroke=\"" + color + "\" class=\"box\"");
    w.line(px0, p.y.to_px(b.median), px1, p.y.to_px(b.median), "stroke=\"" + color + "\" stroke-width=\"2\" class=\"median\"");
    for (double o : b.outliers) w.circle(pxm, p.y.to_px(o), 2, "fill=\"none\" stroke=\"" + color + "\" class=\"outlier\"");
    w.close("g");
  }
  w.close("g");
  legend(w, algos, width - kMarginRight - 120, kMarginTop + 10);
  fig.svg = w.finish();
  return fig;
}

std::string model_point_id(int model) { return "m" + std::to_string(model); }
std::string wa_point_id(std::size_t ingredients) { return "wa" + std::to_string(ingredients); }
std::string candidate_point_id(int t, int model) { return "c" + std::to_string(t) + "_" + std::to_string(model); }

FrameRoles frame_roles(const SoupTrajectory& traj, std::size_t frame) {
  const auto states = traj.accepted_states();
  if (frame < 1 || frame > states.size()) throw std::out_of_range("frame outside the trajectory");
  const auto& ing = states[frame - 1]->ingredients;
  FrameRoles r;
  r.current = wa_point_id(frame);
  if (frame >= 2) r.selected = model_point_id(ing[frame - 1]);
  for (std::size_t k = 0; k + 1 < frame; ++k) r.past.push_back(model_point_id(ing[k]));
  for (const auto& it : traj.iterations) {
    if (static_cast<std::size_t>(it.t) != frame) continue;
    for (const auto& e : it.evals) {
      const bool chosen = it.selected_id && *it.selected_id == e.candidate_id;
      r.candidates.push_back(chosen ? wa_point_id(frame + 1) : candidate_point_id(it.t, e.candidate_id));
      r.candidate_models.push_back(model_point_id(e.candidate_id));
    }
  }
  return r;
}

std::vector<MdsFrame> render_mds_frames(const MdsScene& scene, const SoupTrajectory& traj, const PlotSpec& spec) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < scene.ids.size(); ++i) index[scene.ids[i]] = i;
  const auto at = [&](const std::string& id) {
    const auto it = index.find(id);
    if (it == index.end()) throw DataError("embedding has no point '" + id + "'");
    return it->second;
  };
  int max_count = 1;
  for (int c : scene.ingredient_count) max_count = std::max(max_count, c);

  // square data window around a set of points
  const auto window = [&](const std::vector<std::size_t>& pts, double pad_frac) {
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (std::size_t i : pts) {
      x0 = std::min(x0, scene.points[i][0]), x1 = std::max(x1, scene.points[i][0]);
      y0 = std::min(y0, scene.points[i][1]), y1 = std::max(y1, scene.points[i][1]);
    }
    double half = std::max(x1 - x0, y1 - y0) / 2 * (1 + pad_frac);
    if (!(half > 0)) half = 1e-3;
    const double cx = (x0 + x1) / 2, cy = (y0 + y1) / 2;
    return std::array<double, 4>{cx - half, cx + half, cy - half, cy + half};
  };

  std::vector<std::size_t> all(scene.points.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto full = window(all, 0.08);

  std::vector<MdsFrame> frames;
  const std::size_t n_frames = traj.accepted_states().size();
  for (std::size_t f = 1; f <= n_frames; ++f) {
    const FrameRoles roles = frame_roles(traj, f);
    const std::size_t cur = at(roles.current);
    std::vector<std::size_t> focus{cur}, right{cur};
    std::vector<std::size_t> past, cands, cand_models;
    for (const auto& id : roles.past) past.push_back(at(id)), focus.push_back(past.back());
    std::optional<std::size_t> sel;
    if (roles.selected) sel = at(*roles.selected), focus.push_back(*sel);
    for (const auto& id : roles.candidates) cands.push_back(at(id)), focus.push_back(cands.back());
    for (const auto& id : roles.candidate_models) cand_models.push_back(at(id)), right.push_back(cand_models.back());

    const double side = spec.panel_height;
    const double width = kMarginLeft + 3 * side + 2 * (kPanelGap + kMarginLeft / 2) + kMarginRight + 130;
    const double height = kMarginTop + side + kMarginBottom;
    svg::Writer w(width, height);
    PlotSpec ps = spec;
    ps.title = spec.title + " (t=" + std::to_string(f) + ")";
    header(w, ps, width);
    const std::array<double, 4> wins[3] = {full, window(focus, 0.25), window(right, 0.2)};
    const char* names[3] = {"all points", "zoomed", "current WA and candidates"};
    const char* ids[3] = {"panel-all", "panel-zoom", "panel-candidates"};
    PlotSpec panel_spec = spec;
    panel_spec.panel_width = side;
    panel_spec.x_label = "MDS 1";
    panel_spec.y_label = "MDS 2";
    panel_spec.reference_lines.clear();
    w.open("defs");
    for (int k = 0; k < 3; ++k) {
      const PanelGeometry p = panel_at(static_cast<std::size_t>(k), panel_spec, {wins[k][0], wins[k][1]}, {wins[k][2], wins[k][3]});
      w.open("clipPath", "id=\"clip-" + std::to_string(k) + "\"");
      w.rect(p.left, p.top, p.width, p.height, "");
      w.close("clipPath");
    }
    w.close("defs");
    for (int k = 0; k < 3; ++k) {
      const PanelGeometry p = panel_at(static_cast<std::size_t>(k), panel_spec, {wins[k][0], wins[k][1]}, {wins[k][2], wins[k][3]});
      w.open("g", std::string("class=\"panel\" id=\"") + ids[k] + "\"");
      axes(w, p, panel_spec, names[k], false);
      w.open("g", "clip-path=\"url(#clip-" + std::to_string(k) + ")\"");
      const auto px = [&](std::size_t i) { return std::pair{p.x.to_px(scene.points[i][0]), p.y.to_px(scene.points[i][1])}; };
      if (scene.backdrop && k < 2) {
        const auto& tri = *scene.backdrop;
        w.open("g", "class=\"backdrop\"");
        for (std::size_t ti = 0; ti < tri.triangles.size(); ++ti) {
          const auto& t = tri.triangles[ti];
          const Point2 &a = tri.points[t[0]], &b = tri.points[t[1]], &c = tri.points[t[2]];
          const Point2 ab{(a[0] + b[0]) / 2, (a[1] + b[1]) / 2}, bc{(b[0] + c[0]) / 2, (b[1] + c[1]) / 2},
              ca{(c[0] + a[0]) / 2, (c[1] + a[1]) / 2};
          // one subdivision: four sub-triangles shaded at their centroids
          const std::array<std::array<Point2, 3>, 4> subs{{{a, ab, ca}, {ab, b, bc}, {ca, bc, c}, {ab, bc, ca}}};
          for (const auto& s : subs) {
            const Point2 g{(s[0][0] + s[1][0] + s[2][0]) / 3, (s[0][1] + s[1][1] + s[2][1]) / 3};
            Pts poly;
            for (const auto& q : s) poly.emplace_back(p.x.to_px(q[0]), p.y.to_px(q[1]));
            const std::string col = blue_ramp(interpolate(tri, ti, g));
            w.polygon(poly, "fill=\"" + col + "\" stroke=\"" + col + "\" stroke-width=\"0.3\"");
          }
        }
        w.close("g");
      }
      const auto dot = [&](std::size_t i, double r, const std::string& cls) {
        const auto [x, y] = px(i);
        const double c = static_cast<double>(scene.ingredient_count[i] - 1) / std::max(1, max_count - 1);
        w.circle(x, y, r, "fill=\"" + svg::ramp_color(c) + "\" stroke=\"#222\" stroke-width=\"0.4\" class=\"" + cls + "\"");
      };
      if (k == 0) {
        for (std::size_t i = 0; i < scene.points.size(); ++i) dot(i, 2.2, "pt");
      } else if (k == 1) {
        for (std::size_t i : focus) dot(i, 2.6, "pt");
      } else {
        for (std::size_t i : right) dot(i, 2.6, "pt");
      }
      if (k < 2) {
        for (std::size_t i : past) {
          const auto [x, y] = px(i);
          w.circle(x, y, 6, "fill=\"none\" stroke=\"#000\" stroke-width=\"1.2\" class=\"marker-past\"");
        }
        if (sel) {
          const auto [x, y] = px(*sel);
          w.rect(x - 6, y - 6, 12, 12, "fill=\"none\" stroke=\"#000\" stroke-width=\"1.2\" class=\"marker-selected\"");
        }
      }
      {
        const auto [x, y] = px(cur);
        w.open("g", "class=\"marker-wa\"");
        w.line(x - 6, y - 6, x + 6, y + 6, "stroke=\"#000\" stroke-width=\"2\"");
        w.line(x - 6, y + 6, x + 6, y - 6, "stroke=\"#000\" stroke-width=\"2\"");
        w.close("g");
      }
      w.close("g");
      w.close("g");
    }
    const double lx = width - kMarginRight - 120, ly = kMarginTop + 10;
    w.text(lx, ly, "x current WA");
    w.text(lx, ly + 14, "square: newest ingredient");
    w.text(lx, ly + 28, "circle: earlier ingredients");
    w.text(lx, ly + 48, "color: ingredient count");
    frames.push_back({f, w.finish()});
  }
  return frames;
}

}  // namespace soup
