#pragma once

#include <cstddef>
#include <span>

namespace mktlab::stats {

// All moments use the population convention (divide by N), matching the
// standardization used throughout the library.

[[nodiscard]] double mean(std::span<const double> xs);
[[nodiscard]] double variance(std::span<const double> xs);
[[nodiscard]] double stddev(std::span<const double> xs);

/// Pairwise (cascade) summation; result depends only on the element order.
[[nodiscard]] double pairwise_sum(std::span<const double> xs);

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
  double skewness = 0.0;  // NaN when stddev == 0
  double kurtosis = 0.0;  // raw standardized fourth moment, NaN when stddev == 0
};

[[nodiscard]] Moments moments(std::span<const double> xs);

/// Ordinary least squares y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

/// Requires at least two points with distinct x.
[[nodiscard]] LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Standard normal quantile.
[[nodiscard]] double normal_quantile(double p);

}  // namespace mktlab::stats
