#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mktlab {

/// Minimal line plot written as a standalone SVG document. Supports linear
/// or logarithmic axes and a legend; output is byte-stable for equal input.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  SvgPlot& log_x(bool on = true) { log_x_ = on; return *this; }
  SvgPlot& log_y(bool on = true) { log_y_ = on; return *this; }

  /// Points that are non-finite, or non-positive on a log axis, are dropped.
  SvgPlot& add_series(std::string name, std::span<const double> x, std::span<const double> y);

  [[nodiscard]] std::string render() const;
  void write(const std::filesystem::path& path) const;

 private:
  struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
  };

  std::string title_;
  std::string x_label_;
  std::string y_label_;
  bool log_x_ = false;
  bool log_y_ = false;
  std::vector<Series> series_;
};

}  // namespace mktlab
