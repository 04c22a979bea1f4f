#pragma once

// Minimal deterministic SVG writer.

#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace soup::svg {

// Affine map from a data interval onto a pixel interval. The pixel interval
// may be reversed (y axes grow downwards).
class AxisMap {
 public:
  AxisMap(double data_lo, double data_hi, double px_lo, double px_hi);

  double to_px(double v) const { return px_lo_ + (v - data_lo_) * scale_; }
  double to_data(double px) const { return data_lo_ + (px - px_lo_) / scale_; }
  double data_lo() const { return data_lo_; }
  double data_hi() const { return data_hi_; }
  double px_lo() const { return px_lo_; }
  double px_hi() const { return px_hi_; }

 private:
  double data_lo_, data_hi_, px_lo_, px_hi_, scale_;
};

// Pixel coordinates are written with two decimals.
std::string num(double v);
std::string escape(std::string_view text);

class Writer {
 public:
  Writer(double width, double height);

  Writer& open(std::string_view tag, std::string_view attrs = {});
  Writer& close(std::string_view tag);
  Writer& leaf(std::string_view tag, std::string_view attrs);
  // <tag>escaped content</tag>
  Writer& element(std::string_view tag, std::string_view content);
  Writer& text(double x, double y, std::string_view content, std::string_view attrs = {});
  Writer& line(double x1, double y1, double x2, double y2, std::string_view attrs);
  Writer& rect(double x, double y, double w, double h, std::string_view attrs);
  Writer& circle(double cx, double cy, double r, std::string_view attrs);
  Writer& polyline(const std::vector<std::pair<double, double>>& pts, std::string_view attrs);
  Writer& polygon(const std::vector<std::pair<double, double>>& pts, std::string_view attrs);

  // Closes the root element and returns the document.
  std::string finish();

 private:
  std::ostringstream out_;
  int depth_ = 1;
};

std::string points_attr(const std::vector<std::pair<double, double>>& pts);

// Sequential color scale for values in [0, 1].
std::string ramp_color(double v);

}  // namespace soup::svg
