#include "mktlab/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "mktlab/error.hpp"

namespace mktlab {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  [[nodiscard]] double map(double v) const {
    const double t = log ? std::log10(v) : v;
    return hi > lo ? (t - lo) / (hi - lo) : 0.5;
  }
  [[nodiscard]] double unmap(double t) const {
    const double v = lo + t * (hi - lo);
    return log ? std::pow(10.0, v) : v;
  }
};

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

SvgPlot& SvgPlot::add_series(std::string name, std::span<const double> x,
                             std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::shape, "plot series x/y lengths differ");
  series_.push_back({std::move(name), {x.begin(), x.end()}, {y.begin(), y.end()}});
  return *this;
}

std::string SvgPlot::render() const {
  Axis ax{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(), log_x_};
  Axis ay{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(), log_y_};
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x_ || x > 0.0) && (!log_y_ || y > 0.0);
  };
  for (const auto& s : series_) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      const double tx = log_x_ ? std::log10(s.x[i]) : s.x[i];
      const double ty = log_y_ ? std::log10(s.y[i]) : s.y[i];
      ax.lo = std::min(ax.lo, tx);
      ax.hi = std::max(ax.hi, tx);
      ay.lo = std::min(ay.lo, ty);
      ay.hi = std::max(ay.hi, ty);
    }
  }
  if (ax.lo > ax.hi) ax.lo = 0.0, ax.hi = 1.0;
  if (ay.lo > ay.hi) ay.lo = 0.0, ay.hi = 1.0;
  if (ay.hi == ay.lo) ay.lo -= 0.5, ay.hi += 0.5;
  if (ax.hi == ax.lo) ax.lo -= 0.5, ax.hi += 0.5;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + ax.map(v) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - ay.map(v)) * ph; };

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight, kWidth, kHeight);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     kLeft + pw / 2, escape(title_));
  out += fmt::format(
      "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      kLeft, kTop, pw, ph);

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double t = static_cast<double>(i) / kTicks;
    const double x = kLeft + t * pw;
    const double y = kTop + (1.0 - t) * ph;
    out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"black\"/>\n",
                       x, kTop + ph, x, kTop + ph + 5);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.4g}</text>\n", x,
                       kTop + ph + 18, ax.unmap(t));
    out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"black\"/>\n",
                       kLeft - 5, y, kLeft, y);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n",
                       kLeft - 8, y + 4, ay.unmap(t));
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}{}</text>\n",
                     kLeft + pw / 2, kHeight - 15, escape(x_label_), log_x_ ? " (log)" : "");
  out += fmt::format(
      "<text x=\"18\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1f})\">{}{}</text>\n",
      kTop + ph / 2, kTop + ph / 2, escape(y_label_), log_y_ ? " (log)" : "");

  for (std::size_t s = 0; s < series_.size(); ++s) {
    const auto& ser = series_[s];
    const char* colour = kPalette[s % std::size(kPalette)];
    std::string points;
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (!usable(ser.x[i], ser.y[i])) continue;
      points += fmt::format("{:.2f},{:.2f} ", px(ser.x[i]), py(ser.y[i]));
    }
    if (!points.empty()) points.pop_back();
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                       colour, points);
    const double ly = kTop + 10 + 18.0 * static_cast<double>(s);
    out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       kWidth - kRight + 10, ly, kWidth - kRight + 30, ly, colour);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", kWidth - kRight + 35, ly + 4,
                       escape(ser.name));
  }
  out += "</svg>\n";
  return out;
}

void SvgPlot::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::invalid_argument, fmt::format("cannot write '{}'", path.string()));
  out << render();
}

}  // namespace mktlab
