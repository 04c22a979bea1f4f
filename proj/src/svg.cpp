#include "soup/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace soup::svg {

AxisMap::AxisMap(double data_lo, double data_hi, double px_lo, double px_hi)
    : data_lo_(data_lo), data_hi_(data_hi), px_lo_(px_lo), px_hi_(px_hi) {
  if (!(data_hi != data_lo) || !std::isfinite(data_lo) || !std::isfinite(data_hi))
    throw std::invalid_argument("axis map needs a finite, non-empty data range");
  if (px_hi == px_lo) throw std::invalid_argument("axis map needs a non-empty pixel range");
  scale_ = (px_hi - px_lo) / (data_hi - data_lo);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string points_attr(const std::vector<std::pair<double, double>>& pts) {
  std::string s;
  for (const auto& [x, y] : pts) {
    if (!s.empty()) s += ' ';
    s += num(x) + ',' + num(y);
  }
  return s;
}

Writer::Writer(double width, double height) {
  out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
       << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
}

Writer& Writer::open(std::string_view tag, std::string_view attrs) {
  out_ << std::string(static_cast<std::size_t>(depth_), ' ') << '<' << tag;
  if (!attrs.empty()) out_ << ' ' << attrs;
  out_ << ">\n";
  ++depth_;
  return *this;
}

Writer& Writer::close(std::string_view tag) {
  --depth_;
  out_ << std::string(static_cast<std::size_t>(depth_), ' ') << "</" << tag << ">\n";
  return *this;
}

Writer& Writer::leaf(std::string_view tag, std::string_view attrs) {
  out_ << std::string(static_cast<std::size_t>(depth_), ' ') << '<' << tag << ' ' << attrs << "/>\n";
  return *this;
}

Writer& Writer::element(std::string_view tag, std::string_view content) {
  out_ << std::string(static_cast<std::size_t>(depth_), ' ') << '<' << tag << '>' << escape(content) << "</" << tag
       << ">\n";
  return *this;
}

Writer& Writer::text(double x, double y, std::string_view content, std::string_view attrs) {
  out_ << std::string(static_cast<std::size_t>(depth_), ' ') << "<text x=\"" << num(x) << "\" y=\"" << num(y) << '"';
  if (!attrs.empty()) out_ << ' ' << attrs;
  out_ << '>' << escape(content) << "</text>\n";
  return *this;
}

Writer& Writer::line(double x1, double y1, double x2, double y2, std::string_view attrs) {
  return leaf("line", "x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) + "\" " +
                          std::string(attrs));
}

Writer& Writer::rect(double x, double y, double w, double h, std::string_view attrs) {
  return leaf("rect", "x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" " +
                          std::string(attrs));
}

Writer& Writer::circle(double cx, double cy, double r, std::string_view attrs) {
  return leaf("circle", "cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" " + std::string(attrs));
}

Writer& Writer::polyline(const std::vector<std::pair<double, double>>& pts, std::string_view attrs) {
  return leaf("polyline", "points=\"" + points_attr(pts) + "\" " + std::string(attrs));
}

Writer& Writer::polygon(const std::vector<std::pair<double, double>>& pts, std::string_view attrs) {
  return leaf("polygon", "points=\"" + points_attr(pts) + "\" " + std::string(attrs));
}

std::string Writer::finish() {
  while (depth_ > 1) close("g");
  out_ << "</svg>\n";
  depth_ = 0;
  return out_.str();
}

std::string ramp_color(double v) {
  // viridis-like stops
  static constexpr std::array<std::array<double, 3>, 5> stops{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  if (!std::isfinite(v)) v = 0.0;
  v = std::clamp(v, 0.0, 1.0) * static_cast<double>(stops.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(v), stops.size() - 2);
  const double f = v - static_cast<double>(i);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

}  // namespace soup::svg
