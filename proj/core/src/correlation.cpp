#include "mktlab/correlation.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mktlab/error.hpp"
#include "mktlab/stats.hpp"

namespace mktlab {

namespace {

std::vector<double> restandardized_abs(const ReducedSeries& s) {
  std::vector<double> abs_values;
  abs_values.reserve(s.values.size());
  for (double v : s.values) abs_values.push_back(std::abs(v));
  return reduce(s.id + "|abs|", abs_values).values;
}

}  // namespace

CorrelationFunction cross_correlation(const ReducedSeries& a, const ReducedSeries& b,
                                      std::size_t n_max, bool absolute) {
  const std::size_t n = a.values.size();
  if (b.values.size() != n) {
    throw Error(ErrorKind::shape, fmt::format("cross_correlation: lengths {} and {} differ", n,
                                              b.values.size()));
  }
  if (n_max >= n) {
    throw Error(ErrorKind::range,
                fmt::format("cross_correlation: n_max {} must be below series length {}", n_max, n));
  }

  std::vector<double> abs_a, abs_b;
  std::span<const double> xa = a.values;
  std::span<const double> xb = b.values;
  if (absolute) {
    abs_a = restandardized_abs(a);
    abs_b = restandardized_abs(b);
    xa = abs_a;
    xb = abs_b;
  }

  CorrelationFunction out;
  out.first_id = a.id;
  out.second_id = b.id;
  out.absolute = absolute;
  out.lags.reserve(n_max + 1);
  out.values.reserve(n_max + 1);
  std::vector<double> products;
  for (std::size_t lag = 0; lag <= n_max; ++lag) {
    const std::size_t terms = n - lag;
    products.resize(terms);
    for (std::size_t i = 0; i < terms; ++i) products[i] = xa[i] * xb[i + lag];
    out.lags.push_back(static_cast<int>(lag));
    out.values.push_back(stats::pairwise_sum(products) / static_cast<double>(terms));
  }
  return out;
}

double noise_band(std::size_t samples, double confidence) {
  if (samples < 2) throw Error(ErrorKind::invalid_argument, "noise_band: need N >= 2");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "noise_band: confidence must lie in (0, 1)");
  }
  const double z = stats::normal_quantile(0.5 + 0.5 * confidence);
  return z / std::sqrt(static_cast<double>(samples));
}

}  // namespace mktlab
