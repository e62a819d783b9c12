#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mktlab/date.hpp"
#include "mktlab/ingest.hpp"

/// Seeded synthetic data used by the fixtures, the tests and the benchmarks.
namespace mktlab::synthetic {

[[nodiscard]] std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sigma = 1.0);
[[nodiscard]] std::vector<double> uniform(std::size_t n, std::uint64_t seed, double lo = -1.0,
                                          double hi = 1.0);

/// x(t) = rho x(t-1) + e(t), unit-variance stationary start.
[[nodiscard]] std::vector<double> ar1(std::size_t n, double rho, std::uint64_t seed);

/// ARFIMA(0, d, 0) noise from a truncated moving-average filter with
/// `memory` coefficients; DFA exponent ~ 0.5 + d on scales below `memory`.
[[nodiscard]] std::vector<double> fractional_noise(std::size_t n, double d, std::uint64_t seed,
                                                   std::size_t memory = 2000);

/// Monday-to-Friday calendar of `count` days starting at `first` (moved
/// forward to a weekday if needed).
[[nodiscard]] std::vector<Date> business_days(Date first, std::size_t count);

/// Closes start * exp(cumsum(log_returns)), one longer than the input.
[[nodiscard]] std::vector<double> prices_from_log_returns(std::span<const double> log_returns,
                                                          double start = 100.0);

struct MarketShape {
  std::size_t series = 4;          // target is column 0
  std::size_t rows = 760;
  double target_start = 100000.0;  // index points
  double target_step = 1000.0;     // daily change scale in points
  Date first_date{2015, 12, 28};
};

/// Every column an additive Gaussian random walk; no predictable structure.
[[nodiscard]] AlignedPanel random_walk_panel(const MarketShape& shape, std::uint64_t seed);

/// Panel whose target change from day t to t+1 is a fixed nonlinear function
/// of the five most recent smoothed 5-day first-principal-component values
/// computed from the panel itself, plus Gaussian noise whose deviation is
/// `noise_ratio` times the deviation of that function.
[[nodiscard]] AlignedPanel learnable_panel(const MarketShape& shape, std::uint64_t seed,
                                           double noise_ratio = 0.25);

}  // namespace mktlab::synthetic
