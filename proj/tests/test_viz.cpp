#include <cmath>
#include <random>
#include <regex>

#include "doctest.h"
#include "soup/viz.hpp"
#include "test_support.hpp"

using namespace soup;
using namespace soup::testing;

namespace {

Series make_series(const std::string& algo, const std::string& stat, std::vector<int> t,
                   const std::vector<std::vector<double>>& per_t_values) {
  Series s;
  s.algorithm = algo;
  s.statistic = stat;
  s.t = std::move(t);
  for (const auto& v : per_t_values) {
    s.values.push_back(v);
    s.carried.emplace_back(v.size(), false);
    s.summary.push_back(summarize(v));
  }
  return s;
}

// Contents of the element with the given id attribute, up to the next panel.
std::string panel(const std::string& svg, const std::string& id) {
  const auto b = svg.find("id=\"" + id + "\"");
  REQUIRE(b != std::string::npos);
  const auto e = svg.find("class=\"panel\"", b);
  return svg.substr(b, e == std::string::npos ? std::string::npos : e - b);
}

std::string attr_of(const std::string& svg, const std::string& cls, const std::string& attr) {
  const auto c = svg.find("class=\"" + cls + "\"");
  REQUIRE(c != std::string::npos);
  const auto open = svg.rfind('<', c);
  const auto a = svg.find(attr + "=\"", open);
  REQUIRE(a != std::string::npos);
  const auto v = a + attr.size() + 2;
  return svg.substr(v, svg.find('"', v) - v);
}

SoupTrajectory four_model_run() {
  SoupTrajectory t;
  t.algorithm = Algorithm::Greedier;
  t.initial.ingredients = {2};
  Iteration a;
  a.t = 1;
  a.evals = {{1, 0.5, 0.5, 0, 0, false}, {3, 0.9, 0.8, 0, 0, true}, {4, 0.6, 0.6, 0, 0, false}};
  a.selected_id = 3;
  a.wa_after.ingredients = {2, 3};
  Iteration b;
  b.t = 2;
  b.evals = {{1, 0.95, 0.9, 0, 0, true}, {4, 0.7, 0.7, 0, 0, false}};
  b.selected_id = 1;
  b.wa_after.ingredients = {2, 3, 1};
  Iteration c;
  c.t = 3;
  c.evals = {{4, 0.8, 0.8, 0, 0, false}};
  c.wa_after = b.wa_after;
  t.iterations = {a, b, c};
  t.terminated_at = 3;
  return t;
}

MdsScene scene_for(const std::vector<std::string>& ids, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  MdsScene s;
  s.ids = ids;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    s.points.push_back({u(rng), u(rng)});
    s.accuracy.push_back(0.5 + 0.4 * u(rng));
    s.ingredient_count.push_back(ids[i][0] == 'm' ? 1 : 2);
  }
  s.backdrop = triangulate(s.points, s.accuracy);
  return s;
}

}  // namespace

TEST_CASE("xml checker") {
  CHECK(xml_problem("<a><b x=\"1\"/>t &amp; u</a>").empty());
  CHECK_FALSE(xml_problem("<a><b></a>").empty());
  CHECK_FALSE(xml_problem("<a x=1/>").empty());
  CHECK_FALSE(xml_problem("<a/><b/>").empty());
  CHECK_FALSE(xml_problem("<a>&nbsp;</a>").empty());
  CHECK_FALSE(xml_problem("<a x=\"1\" x=\"2\"/>").empty());
  svg::Writer w(10, 10);
  w.text(1, 1, "a < b & \"c\"");
  CHECK(xml_problem(w.finish()).empty());
}

TEST_CASE("axis map is affine and invertible") {
  const svg::AxisMap m(2.0, 4.0, 64.0, 444.0);
  CHECK(m.to_px(2.0) == 64.0);
  CHECK(m.to_px(4.0) == 444.0);
  CHECK(m.to_px(3.0) == 254.0);
  const svg::AxisMap y(-0.1, 0.3, 304.0, 44.0);
  CHECK(y.to_px(-0.1) == doctest::Approx(304.0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.1, 0.3);
  const double per_px = 0.4 / 260.0;
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    CHECK(y.to_data(y.to_px(v)) == doctest::Approx(v));
    // through the two-decimal quantization of the SVG text
    CHECK(std::abs(y.to_data(std::stod(svg::num(y.to_px(v)))) - v) <= 0.5 * per_px);
  }
  CHECK_THROWS_AS(svg::AxisMap(1, 1, 0, 10), std::invalid_argument);
}

TEST_CASE("ci lines: coordinates follow the affine mapping") {
  SeriesBundle b;
  b.series.push_back(make_series("greedy", "acc_diff/id_val", {2, 3, 4}, {{0.1, 0.1}, {0.2, 0.3}, {0.15, 0.05}}));
  b.series.push_back(make_series("greedy", "acc_diff/ood_test", {2, 3, 4}, {{0.0}, {0.0}, {0.0}}));
  PlotSpec spec;
  spec.config_hash = "cafe";
  const Figure f = render_ci_lines(b, "acc_diff", spec);
  CHECK(xml_problem(f.svg).empty());
  CHECK(f.svg.find("<desc>config cafe</desc>") != std::string::npos);
  REQUIRE(f.panels.size() == 2);

  // hand transform: x in [2, 4] onto the panel width, y padded by 5% of the
  // span of the CI bounds onto the panel height (inverted)
  const auto& s = b.series[0];
  double lo = 1e9, hi = -1e9;
  for (const auto& sp : {b.series[0], b.series[1]})
    for (const auto& m : sp.summary) lo = std::min(lo, m.ci_lo()), hi = std::max(hi, m.ci_hi());
  const double pad = 0.05 * (hi - lo);
  std::string expect;
  for (std::size_t i = 0; i < 3; ++i) {
    const double px = kMarginLeft + (s.t[i] - 2.0) / 2.0 * spec.panel_width;
    const double py = kMarginTop + spec.panel_height - (s.summary[i].mean - (lo - pad)) / ((hi + pad) - (lo - pad)) * spec.panel_height;
    if (!expect.empty()) expect += ' ';
    expect += svg::num(px) + ',' + svg::num(py);
  }
  CHECK(attr_of(panel(f.svg, "panel-id"), "series greedy", "points") == expect);
}

TEST_CASE("ci lines: flat and zero-variance series") {
  SeriesBundle b;
  b.series.push_back(make_series("greedier", "d/id_val", {2, 3, 4}, {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}));
  b.series.push_back(make_series("greedier", "d/ood_test", {2, 3, 4}, {{0.1, 0.3}, {0.1, 0.3}, {0.1, 0.3}}));
  const Figure f = render_ci_lines(b, "d", {});
  const auto ys = [](const std::string& pts) {
    std::vector<std::string> out;
    std::regex re(",([-0-9.]+)");
    for (auto it = std::sregex_iterator(pts.begin(), pts.end(), re); it != std::sregex_iterator(); ++it)
      out.push_back((*it)[1]);
    return out;
  };
  const auto line = ys(attr_of(panel(f.svg, "panel-id"), "series greedier", "points"));
  CHECK(line == std::vector<std::string>(3, line[0]));
  // zero variance: the ribbon collapses onto the line
  const auto rib = ys(attr_of(panel(f.svg, "panel-id"), "ribbon greedier", "points"));
  CHECK(rib == std::vector<std::string>(6, line[0]));
  // constant non-zero spread: the ribbon has constant height
  const auto rib2 = ys(attr_of(panel(f.svg, "panel-ood"), "ribbon greedier", "points"));
  REQUIRE(rib2.size() == 6);
  CHECK(rib2[0] == rib2[1]);
  CHECK(rib2[1] == rib2[2]);
  CHECK(rib2[3] == rib2[5]);
  CHECK(rib2[0] != rib2[3]);

  CHECK_THROWS_AS(render_ci_lines(b, "missing", {}), std::invalid_argument);
  CHECK_THROWS_AS(render_ci_lines(SeriesBundle{}, "d", {}), std::invalid_argument);
}

TEST_CASE("boxplots") {
  PlotSpec spec;
  spec.reference_lines = {0.5};
  spec.y_range = std::pair{0.0, 1.05};
  SUBCASE("identical values give a zero-height box") {
    const Figure f = render_boxplots({{"greedier", 1, {0.4, 0.4, 0.4}}}, spec);
    CHECK(xml_problem(f.svg).empty());
    CHECK(attr_of(f.svg, "box", "height") == "0.00");
  }
  SUBCASE("box edges at hand quartiles") {
    const Figure f = render_boxplots({{"greedy", 2, {0.9, 0.1, 0.3, 0.7, 0.4}}}, spec);
    const auto& p = f.panels[0];
    // sorted 0.1 0.3 0.4 0.7 0.9: q1 = 0.3, median = 0.4, q3 = 0.7
    CHECK(attr_of(f.svg, "box", "y") == svg::num(p.y.to_px(0.7)));
    CHECK(attr_of(f.svg, "box", "height") == svg::num(p.y.to_px(0.3) - p.y.to_px(0.7)));
    CHECK(attr_of(f.svg, "median", "y1") == svg::num(p.y.to_px(0.4)));
  }
  SUBCASE("quantile plots carry the dashed 0.5 line") {
    const Figure f = render_boxplots({{"greedy", 1, {0.9}}, {"greedier", 1, {0.6, 0.7}}, {"greedy", 2, {}}}, spec);
    CHECK(count_occurrences(f.svg, "class=\"reference\"") == 1);
    CHECK(attr_of(f.svg, "reference", "y1") == svg::num(f.panels[0].y.to_px(0.5)));
    CHECK(f.svg.find("stroke-dasharray") != std::string::npos);
    CHECK(f.notes.size() == 1);
  }
  SUBCASE("outliers beyond 1.5 IQR") {
    const Figure f = render_boxplots({{"greedy", 1, {0.1, 0.2, 0.3, 0.4, 1.0}}}, PlotSpec{});
    CHECK(count_occurrences(f.svg, "class=\"outlier\"") == 1);
  }
  CHECK_THROWS_AS(render_boxplots({{"greedy", 1, {}}}, spec), std::invalid_argument);
}

TEST_CASE("mds frame roles for a hand-simulated four-model run") {
  const auto t = four_model_run();
  const auto r1 = frame_roles(t, 1);
  CHECK(r1.current == "wa1");
  CHECK_FALSE(r1.selected.has_value());
  CHECK(r1.past.empty());
  CHECK(r1.candidates == std::vector<std::string>{"c1_1", "wa2", "c1_4"});
  CHECK(r1.candidate_models == std::vector<std::string>{"m1", "m3", "m4"});
  const auto r2 = frame_roles(t, 2);
  CHECK(r2.current == "wa2");
  CHECK(r2.selected == "m3");
  CHECK(r2.past == std::vector<std::string>{"m2"});
  CHECK(r2.candidates == std::vector<std::string>{"wa3", "c2_4"});
  const auto r3 = frame_roles(t, 3);
  CHECK(r3.selected == "m1");
  CHECK(r3.past == std::vector<std::string>{"m2", "m3"});
  CHECK(r3.candidates == std::vector<std::string>{"c3_4"});
  CHECK_THROWS_AS(frame_roles(t, 4), std::out_of_range);
}

TEST_CASE("mds frames: markers per convention, valid and deterministic") {
  const auto t = four_model_run();
  const std::vector<std::string> ids{"m1", "m2", "m3", "m4", "wa1", "wa2", "wa3", "c1_1", "c1_4", "c2_4", "c3_4"};
  const auto scene = scene_for(ids, 9);
  PlotSpec spec;
  spec.title = "frames";
  const auto frames = render_mds_frames(scene, t, spec);
  REQUIRE(frames.size() == 3);
  for (const auto& f : frames) {
    CHECK(xml_problem(f.svg).empty());
    const std::string left = panel(f.svg, "panel-all");
    CHECK(count_occurrences(left, "class=\"marker-wa\"") == 1);
    CHECK(count_occurrences(left, "class=\"marker-selected\"") == (f.t == 1 ? 0u : 1u));
    CHECK(count_occurrences(left, "class=\"marker-past\"") == f.t - 1);
    CHECK(count_occurrences(left, "class=\"pt\"") == ids.size());
    CHECK(left.find("class=\"backdrop\"") != std::string::npos);
  }
  const auto again = render_mds_frames(scene, t, spec);
  for (std::size_t i = 0; i < frames.size(); ++i) CHECK(frames[i].svg == again[i].svg);

  MdsScene missing = scene;
  missing.ids[6] = "other";
  CHECK_THROWS_AS(render_mds_frames(missing, t, spec), DataError);
}
