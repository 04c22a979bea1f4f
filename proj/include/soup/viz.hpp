#pragma once

// Figure families rendered as standalone SVG:
//   ci-lines   mean series with 95% ribbons, ID and OOD panels side by side
//   boxplot    per-t boxes grouped by algorithm (Tukey whiskers)
//   mds-frame  embedded models and weight-averages at one step, three panels

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "soup/analysis.hpp"
#include "soup/mds.hpp"
#include "soup/svg.hpp"

namespace soup {

struct PlotSpec {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  std::vector<double> reference_lines;  // dashed horizontal lines
  std::optional<std::pair<double, double>> y_range;
  std::string config_hash;
  double panel_width = 380;
  double panel_height = 260;
};

struct PanelGeometry {
  double left = 0, top = 0, width = 0, height = 0;
  svg::AxisMap x{0, 1, 0, 1};
  svg::AxisMap y{0, 1, 1, 0};
};

struct Figure {
  std::string svg;
  std::vector<PanelGeometry> panels;
  std::vector<std::string> notes;
};

inline constexpr double kMarginLeft = 64, kMarginRight = 24, kMarginTop = 44, kMarginBottom = 48, kPanelGap = 40;

// Data interval shown for values spanning [lo, hi]: padded by 5% of the span,
// or by max(5% of |lo|, 0.01) when the span is zero.
std::pair<double, double> padded_range(double lo, double hi);

std::string algorithm_color(const std::string& algorithm);

// Panels for "<statistic>/id_val" and "<statistic>/ood_test", every
// algorithm that has them. Throws std::invalid_argument when neither exists
// or both are empty.
Figure render_ci_lines(const SeriesBundle& bundle, const std::string& statistic, const PlotSpec& spec);

struct BoxGroup {
  std::string algorithm;
  int t = 0;
  std::vector<double> values;
};

std::vector<BoxGroup> quantile_groups(const std::vector<QuantileRecord>& records);
std::vector<BoxGroup> distance_groups(const std::vector<DistanceBin>& bins);

// Empty groups are left out and reported in Figure::notes. Throws
// std::invalid_argument when no group has values.
Figure render_boxplots(const std::vector<BoxGroup>& groups, const PlotSpec& spec);

// Point ids used by MDS scenes.
std::string model_point_id(int model);
std::string wa_point_id(std::size_t ingredients);
std::string candidate_point_id(int t, int model);

struct MdsScene {
  std::vector<std::string> ids;
  std::vector<Point2> points;
  std::vector<double> accuracy;
  std::vector<int> ingredient_count;  // 1 for individual models
  std::optional<Triangulation> backdrop;
};

// Marker roles in frame t (the WA with t ingredients):
//   current     x marker
//   selected    square: the ingredient that formed the current WA (none at t = 1)
//   past        circles: the t - 1 ingredients accepted before it
//   candidates  WAs evaluated from the current WA at step t
//   candidate_models  the individual models behind those candidates
struct FrameRoles {
  std::string current;
  std::optional<std::string> selected;
  std::vector<std::string> past;
  std::vector<std::string> candidates;
  std::vector<std::string> candidate_models;
};

FrameRoles frame_roles(const SoupTrajectory& t, std::size_t frame);

struct MdsFrame {
  std::size_t t = 0;
  std::string svg;
};

// One frame per accepted WA. Throws DataError when a referenced point is
// missing from the scene.
std::vector<MdsFrame> render_mds_frames(const MdsScene& scene, const SoupTrajectory& trajectory, const PlotSpec& spec);

}  // namespace soup
