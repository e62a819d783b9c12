#include "mktlab/dcca.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mktlab/error.hpp"
#include "mktlab/parallel.hpp"
#include "mktlab/stats.hpp"

namespace mktlab {

std::vector<double> integrate(std::span<const double> values) {
  std::vector<double> out;
  out.reserve(values.size());
  double running = 0.0;
  for (double v : values) {
    running += v;
    out.push_back(running);
  }
  return out;
}

IntegratedSeries integrate(const ReducedSeries& series) {
  if (series.values.empty()) throw Error(ErrorKind::insufficient_data, "integrate: empty series");
  return {series.id, integrate(series.values)};
}

namespace {

using wide = long double;

// Running sums of x, x*y and i*x over a profile, in extended precision. The
// i*x sums reach ~N^2 * |S| so double would lose the short-box residuals.
struct PrefixSums {
  std::vector<wide> sum;
  std::vector<wide> weighted;

  explicit PrefixSums(std::span<const double> profile)
      : sum(profile.size() + 1, 0.0L), weighted(profile.size() + 1, 0.0L) {
    for (std::size_t i = 0; i < profile.size(); ++i) {
      sum[i + 1] = sum[i] + profile[i];
      weighted[i + 1] = weighted[i] + static_cast<wide>(i) * profile[i];
    }
  }
};

double mean_window_covariance(const PrefixSums& pa, const PrefixSums& pb,
                              const std::vector<wide>& cross, std::size_t length,
                              std::size_t box, bool self) {
  const std::size_t m = box + 1;
  const std::size_t windows = length - box;
  const wide wm = static_cast<wide>(m);
  const wide sx = wm * (wm - 1.0L) / 2.0L;
  const wide sxx = wm * (wm * wm - 1.0L) / 12.0L;

  wide total = 0.0L;
  for (std::size_t j = 0; j < windows; ++j) {
    const std::size_t e = j + m;
    const wide wj = static_cast<wide>(j);
    const wide sa = pa.sum[e] - pa.sum[j];
    const wide sb = pb.sum[e] - pb.sum[j];
    const wide sab = cross[e] - cross[j];
    const wide xa = pa.weighted[e] - pa.weighted[j] - wj * sa;
    const wide xb = pb.weighted[e] - pb.weighted[j] - wj * sb;
    const wide cab = sab - sa * sb / wm;
    const wide cxa = xa - sx * sa / wm;
    const wide cxb = xb - sx * sb / wm;
    wide resid = cab - cxa * cxb / sxx;
    if (self && resid < 0.0L) resid = 0.0L;
    total += resid;
  }
  return static_cast<double>(total / static_cast<wide>(box - 1) / static_cast<wide>(windows));
}

}  // namespace

DccaCurve dcca_f2(std::span<const double> a, std::span<const double> b,
                  std::span<const std::size_t> box_sizes, unsigned workers) {
  const std::size_t n = a.size();
  if (b.size() != n) {
    throw Error(ErrorKind::shape, fmt::format("dcca_f2: lengths {} and {} differ", n, b.size()));
  }
  for (std::size_t i = 0; i < box_sizes.size(); ++i) {
    const std::size_t box = box_sizes[i];
    if (box < 2) throw Error(ErrorKind::range, fmt::format("dcca_f2: box size {} < 2", box));
    if (box + 1 > n) {
      throw Error(ErrorKind::range,
                  fmt::format("dcca_f2: box size {} needs {} points, series has {}", box, box + 1, n));
    }
    if (i > 0 && box <= box_sizes[i - 1]) {
      throw Error(ErrorKind::range, "dcca_f2: box sizes must be strictly increasing");
    }
  }

  const bool self = a.data() == b.data() || std::equal(a.begin(), a.end(), b.begin());
  const auto profile_a = integrate(a);
  const auto profile_b = self ? profile_a : integrate(b);
  const PrefixSums pa(profile_a);
  const PrefixSums pb(profile_b);
  std::vector<wide> cross(n + 1, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    cross[i + 1] = cross[i] + static_cast<wide>(profile_a[i]) * profile_b[i];
  }

  DccaCurve curve;
  curve.box_sizes.assign(box_sizes.begin(), box_sizes.end());
  curve.f2.assign(box_sizes.size(), 0.0);
  parallel_for(box_sizes.size(), workers, [&](std::size_t i) {
    curve.f2[i] = mean_window_covariance(pa, pb, cross, n, box_sizes[i], self);
  });
  return curve;
}

DccaCurve dcca_f2(const ReducedSeries& a, const ReducedSeries& b,
                  std::span<const std::size_t> box_sizes, unsigned workers) {
  auto curve = dcca_f2(std::span<const double>(a.values), std::span<const double>(b.values),
                       box_sizes, workers);
  curve.first_id = a.id;
  curve.second_id = b.id;
  return curve;
}

std::vector<std::size_t> default_box_sizes(std::size_t series_length, std::size_t n_min,
                                           double ratio) {
  if (ratio <= 1.0) throw Error(ErrorKind::invalid_argument, "box grid ratio must exceed 1");
  n_min = std::max<std::size_t>(n_min, 2);
  const std::size_t n_max = series_length / 4;
  std::vector<std::size_t> out;
  for (double n = static_cast<double>(n_min); n <= static_cast<double>(n_max) + 1e-9; n *= ratio) {
    const auto rounded = static_cast<std::size_t>(std::llround(n));
    if (out.empty() || rounded > out.back()) out.push_back(rounded);
  }
  if (out.empty()) {
    throw Error(ErrorKind::insufficient_data,
                fmt::format("series of length {} is too short for boxes >= {}", series_length, n_min));
  }
  return out;
}

ScalingFit fit_power_law(const DccaCurve& curve, std::size_t n_min, std::size_t n_max) {
  if (n_min >= n_max) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("fit range [{}, {}] is empty", n_min, n_max));
  }
  ScalingFit out;
  out.n_min = n_min;
  out.n_max = n_max;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < curve.box_sizes.size(); ++i) {
    const std::size_t box = curve.box_sizes[i];
    if (box < n_min || box > n_max) continue;
    if (curve.f2[i] > 0.0) {
      x.push_back(std::log(static_cast<double>(box)));
      y.push_back(std::log(curve.f2[i]));
    } else {
      ++out.excluded_points;
    }
  }
  if (x.size() < 3) {
    throw Error(ErrorKind::fit,
                fmt::format("no power law: {} positive points in [{}, {}] ({} excluded)", x.size(),
                            n_min, n_max, out.excluded_points));
  }
  const auto line = stats::fit_line(x, y);
  out.lambda = line.slope / 2.0;
  out.intercept = line.intercept;
  out.r_squared = line.r_squared;
  out.slope_stderr = line.slope_stderr;
  out.used_points = x.size();
  return out;
}

}  // namespace mktlab
