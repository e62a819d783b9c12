#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mktlab {

/// Symmetric Levy law of index alpha and scale gamma, cut to [-d, d] and
/// renormalized by c.
struct LevyParams {
  double alpha = 2.0;
  double gamma = 1.0;
  double d = 10.0;
  double c = 0.0;
};

/// Tabulated truncated Levy density with an inverse-CDF sampler.
///
/// The untruncated density is the cosine transform
///
///     L(x) = 1/pi * integral_0^inf exp(-gamma k^alpha) cos(k x) dk
///
/// evaluated by Simpson's rule on 2^16 intervals up to the k where the
/// integrand drops below 1e-12, on a grid of 2^13 intervals over [-d, d].
class TruncatedLevy {
 public:
  static constexpr std::size_t kFrequencyIntervals = std::size_t{1} << 16;
  static constexpr std::size_t kGridIntervals = std::size_t{1} << 13;

  /// Throws invalid_argument for alpha outside (0, 2], gamma <= 0 or d <= 0,
  /// and a numeric error when the quadrature cannot resolve the oscillation
  /// or yields a markedly negative density.
  TruncatedLevy(double alpha, double gamma, double d);

  [[nodiscard]] const LevyParams& params() const noexcept { return params_; }
  [[nodiscard]] std::span<const double> grid() const noexcept { return x_; }
  /// Normalized truncated density c * L(x) on grid().
  [[nodiscard]] std::span<const double> density() const noexcept { return pdf_; }
  [[nodiscard]] std::span<const double> cdf() const noexcept { return cdf_; }

  /// Untruncated L(x) at one point, same quadrature.
  [[nodiscard]] double levy_density(double x) const;

  /// Interpolated density of the truncated law at x (0 outside [-d, d]).
  [[nodiscard]] double operator()(double x) const;

  [[nodiscard]] std::vector<double> sample(std::size_t count, std::uint64_t seed) const;

 private:
  LevyParams params_;
  double k_max_ = 0.0;
  std::vector<double> kernel_;  // Simpson weight * exp(-gamma k^alpha)
  std::vector<double> x_;
  std::vector<double> pdf_;
  std::vector<double> cdf_;
};

[[nodiscard]] LevyParams make_levy_params(double alpha, double gamma, double d);

/// Draw `count` i.i.d. samples. `params.c` must match the normalization of
/// (alpha, gamma, d) to 1e-6 relative; use make_levy_params to obtain it.
[[nodiscard]] std::vector<double> sample_truncated_levy(const LevyParams& params, std::size_t count,
                                                        std::uint64_t seed);

/// Estimated density of the n-fold sum at the origin, per n.
struct ReturnToOriginCurve {
  std::vector<std::size_t> n_values;
  std::vector<double> p_zero;
  std::vector<double> std_error;
  std::size_t realizations = 0;
  double bin_width = 0.0;
  std::uint64_t seed = 0;
};

/// 0.1 times the population standard deviation of the single returns.
[[nodiscard]] double default_bin_width(std::span<const double> returns);

/// Shuffle-and-sum estimate of P(X_n = 0).
///
/// Every realization shuffles the returns with its own stream derived from
/// `seed` and the realization index, cuts the shuffled series into
/// consecutive non-overlapping blocks of n values and counts block sums with
/// |X_n| < bin_width / 2. The estimate is hits / (blocks * bin_width), so it
/// is a density at zero. `stderr` is the spread of per-realization estimates
/// over sqrt(realizations). Results do not depend on `workers`.
[[nodiscard]] ReturnToOriginCurve return_to_origin(std::span<const double> returns,
                                                   std::span<const std::size_t> n_values,
                                                   std::size_t realizations, double bin_width,
                                                   std::uint64_t seed, unsigned workers = 1);

/// Fitted p_zero ~ n^slope with alpha = -1 / slope.
struct AlphaEstimate {
  double alpha = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double alpha_stderr = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_min = 0;
  std::size_t n_max = 0;
  std::size_t used_points = 0;
};

[[nodiscard]] AlphaEstimate estimate_alpha(const ReturnToOriginCurve& curve, std::size_t n_min,
                                           std::size_t n_max);

/// Shuffled copy of `values` using the stream for (`seed`, `stream`).
[[nodiscard]] std::vector<double> shuffled(std::span<const double> values, std::uint64_t seed,
                                           std::uint64_t stream);

}  // namespace mktlab
