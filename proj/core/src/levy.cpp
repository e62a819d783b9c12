#include "mktlab/levy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mktlab/error.hpp"
#include "mktlab/parallel.hpp"
#include "mktlab/random.hpp"
#include "mktlab/stats.hpp"

namespace mktlab {

namespace {

constexpr double kIntegrandFloor = 1e-12;
// Minimum quadrature nodes per cos(k d) period.
constexpr double kMinNodesPerPeriod = 8.0;
constexpr std::size_t kResyncEvery = 256;

void validate(double alpha, double gamma, double d) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw Error(ErrorKind::invalid_argument, fmt::format("Levy index {} outside (0, 2]", alpha));
  }
  if (!(gamma > 0.0)) throw Error(ErrorKind::invalid_argument, "Levy scale gamma must be > 0");
  if (!(d > 0.0)) throw Error(ErrorKind::invalid_argument, "truncation bound d must be > 0");
}

}  // namespace

TruncatedLevy::TruncatedLevy(double alpha, double gamma, double d) {
  validate(alpha, gamma, d);
  params_ = {alpha, gamma, d, 0.0};
  k_max_ = std::pow(-std::log(kIntegrandFloor) / gamma, 1.0 / alpha);

  const double dk = k_max_ / static_cast<double>(kFrequencyIntervals);
  if (2.0 * std::numbers::pi / (dk * d) < kMinNodesPerPeriod) {
    throw Error(ErrorKind::numeric,
                fmt::format("Levy quadrature does not resolve cos(k x) up to |x| = {} "
                            "(k_max = {:.4g})",
                            d, k_max_));
  }

  kernel_.resize(kFrequencyIntervals + 1);
  for (std::size_t m = 0; m <= kFrequencyIntervals; ++m) {
    const double k = static_cast<double>(m) * dk;
    const double weight =
        (m == 0 || m == kFrequencyIntervals) ? 1.0 : (m % 2 == 1 ? 4.0 : 2.0);
    kernel_[m] = weight * std::exp(-gamma * std::pow(k, alpha));
  }

  const std::size_t points = kGridIntervals + 1;
  const std::size_t mid = kGridIntervals / 2;
  x_.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    x_[i] = -d + 2.0 * d * static_cast<double>(i) / static_cast<double>(kGridIntervals);
  }
  x_[mid] = 0.0;

  std::vector<double> raw(points, 0.0);
  for (std::size_t i = mid; i < points; ++i) raw[i] = levy_density(x_[i]);
  for (std::size_t i = 0; i < mid; ++i) raw[i] = raw[points - 1 - i];

  const double peak = *std::max_element(raw.begin(), raw.end());
  for (double& v : raw) {
    if (v < 0.0) {
      if (v < -1e-9 * peak) {
        throw Error(ErrorKind::numeric,
                    fmt::format("Levy quadrature produced a negative density {:.3g}", v));
      }
      v = 0.0;
    }
  }

  const double h = x_[1] - x_[0];
  std::vector<double> cumulative(points, 0.0);
  for (std::size_t i = 1; i < points; ++i) {
    cumulative[i] = cumulative[i - 1] + 0.5 * h * (raw[i - 1] + raw[i]);
  }
  const double mass = cumulative.back();
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorKind::numeric, "Levy density has no mass on [-d, d]");
  }
  params_.c = 1.0 / mass;
  pdf_.resize(points);
  cdf_.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    pdf_[i] = raw[i] * params_.c;
    cdf_[i] = cumulative[i] / mass;
  }
  cdf_.back() = 1.0;
}

double TruncatedLevy::levy_density(double x) const {
  // Composite Simpson over [0, k_max]; cos(k x) is advanced by a rotation
  // and re-anchored every kResyncEvery nodes to bound the drift.
  const std::size_t intervals = kFrequencyIntervals;
  const double dk = k_max_ / static_cast<double>(intervals);
  const double step_cos = std::cos(dk * x);
  const double step_sin = std::sin(dk * x);
  double c = 1.0;
  double s = 0.0;
  double acc = 0.0;
  for (std::size_t m = 0; m <= intervals; ++m) {
    if (m % kResyncEvery == 0) {
      const double angle = static_cast<double>(m) * dk * x;
      c = std::cos(angle);
      s = std::sin(angle);
    }
    acc += kernel_[m] * c;
    const double next_c = c * step_cos - s * step_sin;
    s = s * step_cos + c * step_sin;
    c = next_c;
  }
  return acc * dk / 3.0 / std::numbers::pi;
}

double TruncatedLevy::operator()(double x) const {
  if (x < -params_.d || x > params_.d) return 0.0;
  const double pos = (x + params_.d) / (2.0 * params_.d) * static_cast<double>(kGridIntervals);
  const auto i = std::min(static_cast<std::size_t>(pos), kGridIntervals - 1);
  const double t = pos - static_cast<double>(i);
  return pdf_[i] * (1.0 - t) + pdf_[i + 1] * t;
}

std::vector<double> TruncatedLevy::sample(std::size_t count, std::uint64_t seed) const {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double u = uniform(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    auto hi = static_cast<std::size_t>(std::distance(cdf_.begin(), it));
    hi = std::clamp<std::size_t>(hi, 1, cdf_.size() - 1);
    const std::size_t lo = hi - 1;
    const double span = cdf_[hi] - cdf_[lo];
    const double t = span > 0.0 ? (u - cdf_[lo]) / span : 0.5;
    out.push_back(std::clamp(x_[lo] + t * (x_[hi] - x_[lo]), -params_.d, params_.d));
  }
  return out;
}

LevyParams make_levy_params(double alpha, double gamma, double d) {
  return TruncatedLevy(alpha, gamma, d).params();
}

std::vector<double> sample_truncated_levy(const LevyParams& params, std::size_t count,
                                          std::uint64_t seed) {
  const TruncatedLevy law(params.alpha, params.gamma, params.d);
  if (!(params.c > 0.0) || std::abs(params.c - law.params().c) > 1e-6 * law.params().c) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("normalization c = {} does not match computed {}", params.c,
                            law.params().c));
  }
  return law.sample(count, seed);
}

double default_bin_width(std::span<const double> returns) {
  const double sd = stats::stddev(returns);
  if (!(sd > 0.0)) {
    throw Error(ErrorKind::degenerate_series, "cannot derive a bin width from constant returns");
  }
  return 0.1 * sd;
}

std::vector<double> shuffled(std::span<const double> values, std::uint64_t seed,
                             std::uint64_t stream) {
  std::vector<double> out(values.begin(), values.end());
  auto rng = make_rng(seed, stream);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

ReturnToOriginCurve return_to_origin(std::span<const double> returns,
                                     std::span<const std::size_t> n_values,
                                     std::size_t realizations, double bin_width,
                                     std::uint64_t seed, unsigned workers) {
  if (realizations < 1) throw Error(ErrorKind::invalid_argument, "need at least one realization");
  if (!(bin_width > 0.0)) throw Error(ErrorKind::invalid_argument, "bin width must be > 0");
  if (n_values.empty()) throw Error(ErrorKind::invalid_argument, "no summand counts given");
  for (std::size_t n : n_values) {
    if (n < 1 || n > returns.size()) {
      throw Error(ErrorKind::range, fmt::format("summand count {} outside [1, {}]", n,
                                                returns.size()));
    }
  }

  const std::size_t k = n_values.size();
  const double half = 0.5 * bin_width;
  // hits[r * k + i]: zero-bin hits of realization r at n_values[i].
  std::vector<std::uint64_t> hits(realizations * k, 0);
  parallel_for(realizations, workers, [&](std::size_t r) {
    const auto series = shuffled(returns, seed, r);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t n = n_values[i];
      const std::size_t blocks = series.size() / n;
      std::uint64_t count = 0;
      for (std::size_t b = 0; b < blocks; ++b) {
        double sum = 0.0;
        for (std::size_t j = b * n; j < (b + 1) * n; ++j) sum += series[j];
        if (std::abs(sum) < half) ++count;
      }
      hits[r * k + i] = count;
    }
  });

  ReturnToOriginCurve curve;
  curve.n_values.assign(n_values.begin(), n_values.end());
  curve.realizations = realizations;
  curve.bin_width = bin_width;
  curve.seed = seed;
  std::vector<double> per_realization(realizations);
  for (std::size_t i = 0; i < k; ++i) {
    const double blocks = static_cast<double>(returns.size() / n_values[i]);
    std::uint64_t total = 0;
    for (std::size_t r = 0; r < realizations; ++r) {
      total += hits[r * k + i];
      per_realization[r] = static_cast<double>(hits[r * k + i]) / (blocks * bin_width);
    }
    const double p = static_cast<double>(total) /
                     (blocks * static_cast<double>(realizations) * bin_width);
    curve.p_zero.push_back(p);
    if (realizations > 1) {
      double ss = 0.0;
      for (double v : per_realization) ss += (v - p) * (v - p);
      const double sd = std::sqrt(ss / static_cast<double>(realizations - 1));
      curve.std_error.push_back(sd / std::sqrt(static_cast<double>(realizations)));
    } else {
      // Single realization: binomial error of the hit fraction.
      const double q = p * bin_width;
      curve.std_error.push_back(std::sqrt(std::max(q * (1.0 - q), 0.0) / blocks) / bin_width);
    }
  }
  return curve;
}

AlphaEstimate estimate_alpha(const ReturnToOriginCurve& curve, std::size_t n_min,
                             std::size_t n_max) {
  if (n_min >= n_max) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("fit range [{}, {}] is empty", n_min, n_max));
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < curve.n_values.size(); ++i) {
    const std::size_t n = curve.n_values[i];
    if (n < n_min || n > n_max || !(curve.p_zero[i] > 0.0)) continue;
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(std::log(curve.p_zero[i]));
  }
  if (x.size() < 3) {
    throw Error(ErrorKind::fit, fmt::format("only {} positive return-to-origin points in [{}, {}]",
                                            x.size(), n_min, n_max));
  }
  const auto line = stats::fit_line(x, y);
  if (!(line.slope < 0.0)) {
    throw Error(ErrorKind::fit,
                fmt::format("return-to-origin curve is not decreasing (slope {:.4g})", line.slope));
  }
  AlphaEstimate out;
  out.slope = line.slope;
  out.alpha = -1.0 / line.slope;
  out.slope_stderr = line.slope_stderr;
  out.alpha_stderr = line.slope_stderr / (line.slope * line.slope);
  out.intercept = line.intercept;
  out.r_squared = line.r_squared;
  out.n_min = n_min;
  out.n_max = n_max;
  out.used_points = x.size();
  return out;
}

}  // namespace mktlab
