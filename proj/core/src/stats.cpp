#include "mktlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>

#include "mktlab/error.hpp"

namespace mktlab::stats {

double pairwise_sum(std::span<const double> xs) {
  constexpr std::size_t kLeaf = 32;
  if (xs.size() <= kLeaf) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorKind::insufficient_data, "mean of empty sample");
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) { return std::sqrt(variance(xs)); }

Moments moments(std::span<const double> xs) {
  Moments out;
  out.mean = mean(xs);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - out.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const auto n = static_cast<double>(xs.size());
  m2 /= n;
  m3 /= n;
  m4 /= n;
  // spread at rounding level of the mean is a constant series
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(out.mean);
  if (m2 <= floor * floor) m2 = 0.0;
  out.stddev = std::sqrt(m2);
  if (m2 > 0.0) {
    out.skewness = m3 / std::pow(m2, 1.5);
    out.kurtosis = m4 / (m2 * m2);
  } else {
    out.skewness = std::numeric_limits<double>::quiet_NaN();
    out.kurtosis = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::shape, "fit_line: x and y differ in length");
  if (x.size() < 2) throw Error(ErrorKind::fit, "fit_line: need at least two points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw Error(ErrorKind::fit, "fit_line: x values are all equal");

  LineFit fit;
  fit.points = x.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  fit.slope_stderr =
      x.size() > 2 ? std::sqrt(ssr / static_cast<double>(x.size() - 2) / sxx) : 0.0;
  return fit;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "normal_quantile: p must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>{}, p);
}

}  // namespace mktlab::stats
