#pragma once

#include <span>
#include <string>
#include <vector>

#include "mktlab/ingest.hpp"

namespace mktlab {

/// Profile S(l) = sum_{i <= l} x(i) of a reduced series.
struct IntegratedSeries {
  std::string id;
  std::vector<double> values;
};

[[nodiscard]] std::vector<double> integrate(std::span<const double> values);
[[nodiscard]] IntegratedSeries integrate(const ReducedSeries& series);

/// Detrended covariance F^2(n) per box size n.
struct DccaCurve {
  std::string first_id;
  std::string second_id;
  std::vector<std::size_t> box_sizes;
  std::vector<double> f2;
};

/// Detrended cross-correlation of two equally long inputs.
///
/// For each box size n the integrated profiles are cut into all N - n
/// overlapping windows of n + 1 points. Inside every window a least-squares
/// line is removed from each profile and
///
///     f2(n, j) = 1/(n - 1) * sum_l resid_a(l) * resid_b(l)
///
/// F^2(n) is the mean of f2 over the windows. Passing the same series twice
/// gives the DFA fluctuation function, which is clamped at zero per window.
/// Box sizes are independent and are spread over `workers` threads.
[[nodiscard]] DccaCurve dcca_f2(std::span<const double> a, std::span<const double> b,
                                std::span<const std::size_t> box_sizes, unsigned workers = 1);
[[nodiscard]] DccaCurve dcca_f2(const ReducedSeries& a, const ReducedSeries& b,
                                std::span<const std::size_t> box_sizes, unsigned workers = 1);

/// Geometric grid from `n_min` up to `series_length / 4` with ratio 2^(1/4),
/// rounded and de-duplicated.
[[nodiscard]] std::vector<std::size_t> default_box_sizes(std::size_t series_length,
                                                         std::size_t n_min = 4,
                                                         double ratio = 1.189207115002721);

/// Power law F^2(n) ~ n^(2 lambda) fitted on the log-log curve.
struct ScalingFit {
  double lambda = 0.0;
  double intercept = 0.0;
  std::size_t n_min = 0;
  std::size_t n_max = 0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  std::size_t used_points = 0;
  /// Points inside the fit range with F^2 <= 0, which have no logarithm.
  std::size_t excluded_points = 0;
};

/// Least squares on (ln n, ln F^2) for n_min <= n <= n_max. Throws a fit error
/// when fewer than three positive points remain.
[[nodiscard]] ScalingFit fit_power_law(const DccaCurve& curve, std::size_t n_min,
                                       std::size_t n_max);

}  // namespace mktlab
