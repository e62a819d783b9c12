#pragma once

#include <string>
#include <vector>

#include "mktlab/ingest.hpp"

namespace mktlab {

/// Lagged correlation C(n) for n = 0..n_max of a pair of reduced series.
struct CorrelationFunction {
  std::string first_id;
  std::string second_id;
  bool absolute = false;
  std::vector<int> lags;
  std::vector<double> values;
};

/// values[n] = mean over i of a(i) * b(i + n), averaged over the N - n
/// overlapping terms, so `a` leads `b`. With `absolute` set, both inputs are
/// replaced by |x| and re-standardized first so that C(0) of an
/// autocorrelation is 1.
[[nodiscard]] CorrelationFunction cross_correlation(const ReducedSeries& a, const ReducedSeries& b,
                                                    std::size_t n_max, bool absolute = false);

/// Half-width z / sqrt(N) of the Gaussian noise band around zero for the
/// two-sided `confidence` level.
[[nodiscard]] double noise_band(std::size_t samples, double confidence = 0.95);

}  // namespace mktlab
