#include "mktlab/pca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "mktlab/error.hpp"
#include "mktlab/parallel.hpp"

namespace mktlab {

PanelDifferences differences(const AlignedPanel& panel) {
  if (panel.rows() < 2) throw Error(ErrorKind::insufficient_data, "panel needs two rows for differences");
  PanelDifferences out;
  out.ids = panel.ids();
  out.values.resize(static_cast<Eigen::Index>(panel.rows() - 1),
                    static_cast<Eigen::Index>(panel.cols()));
  for (std::size_t k = 0; k < panel.cols(); ++k) {
    const auto col = panel.column(k);
    for (std::size_t t = 0; t + 1 < panel.rows(); ++t) {
      out.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = col[t + 1] - col[t];
    }
  }
  const auto dates = panel.dates();
  out.dates.assign(dates.begin() + 1, dates.end());
  return out;
}

namespace {

// Standardized window plus its column moments.
struct Standardized {
  Eigen::MatrixXd z;
};

Standardized standardize(const Eigen::Ref<const Eigen::MatrixXd>& window,
                         const std::vector<std::string>& ids) {
  const auto rows = window.rows();
  if (rows < 2) throw Error(ErrorKind::insufficient_data, "window needs at least two observations");
  if (static_cast<std::size_t>(window.cols()) != ids.size()) {
    throw Error(ErrorKind::shape, "window columns and series ids differ");
  }
  Standardized out;
  out.z.resize(rows, window.cols());
  for (Eigen::Index k = 0; k < window.cols(); ++k) {
    const auto col = window.col(k);
    const double mean = col.mean();
    const Eigen::ArrayXd centered = col.array() - mean;
    const double sigma = std::sqrt(centered.square().mean());
    const double scale = col.cwiseAbs().maxCoeff();
    if (!(sigma > 64.0 * std::numeric_limits<double>::epsilon() * scale)) {
      throw DegenerateWindowError(ids[static_cast<std::size_t>(k)]);
    }
    out.z.col(k) = centered.matrix() / sigma;
  }
  return out;
}

}  // namespace

CovarianceMatrix covariance_matrix(const Eigen::Ref<const Eigen::MatrixXd>& window,
                                   std::vector<std::string> series_ids, Date window_start,
                                   Date window_end) {
  const auto st = standardize(window, series_ids);
  CovarianceMatrix out;
  const Eigen::MatrixXd raw = st.z.transpose() * st.z / static_cast<double>(window.rows());
  out.entries = 0.5 * (raw + raw.transpose());
  out.window_start = window_start;
  out.window_end = window_end;
  out.series_ids = std::move(series_ids);
  return out;
}

EigenDecomposition principal_components(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                        std::size_t target_index) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::shape, "principal_components: matrix must be square and non-empty");
  }
  if (target_index >= static_cast<std::size_t>(m.rows())) {
    throw Error(ErrorKind::invalid_argument, "principal_components: target index out of range");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numeric, "symmetric eigen-solver did not converge");
  }
  const auto k = m.rows();
  EigenDecomposition out;
  out.eigenvalues.resize(k);
  out.eigenvectors.resize(k, k);
  // Eigen returns ascending order.
  for (Eigen::Index i = 0; i < k; ++i) {
    out.eigenvalues(i) = solver.eigenvalues()(k - 1 - i);
    Eigen::VectorXd v = solver.eigenvectors().col(k - 1 - i);
    const double target = v(static_cast<Eigen::Index>(target_index));
    bool flip = false;
    if (std::abs(target) > 1e-12) {
      flip = target > 0.0;
    } else {
      Eigen::Index largest = 0;
      v.cwiseAbs().maxCoeff(&largest);
      flip = v(largest) > 0.0;
    }
    out.eigenvectors.col(i) = flip ? Eigen::VectorXd(-v) : v;
  }
  return out;
}

EigenDecomposition principal_components(const CovarianceMatrix& m, std::size_t target_index) {
  return principal_components(m.entries, target_index);
}

WindowAnalysis analyze_window(const PanelDifferences& diffs, std::size_t end_row,
                              std::size_t window_length, std::size_t target_index) {
  if (window_length < 2) throw Error(ErrorKind::invalid_argument, "window length must be >= 2");
  if (end_row >= static_cast<std::size_t>(diffs.values.rows()) || end_row + 1 < window_length) {
    throw Error(ErrorKind::range,
                fmt::format("window of {} rows cannot end at row {}", window_length, end_row));
  }
  const auto first = static_cast<Eigen::Index>(end_row + 1 - window_length);
  const auto len = static_cast<Eigen::Index>(window_length);
  const auto window = diffs.values.middleRows(first, len);

  WindowAnalysis out;
  out.covariance = covariance_matrix(window, diffs.ids, diffs.dates[static_cast<std::size_t>(first)],
                                     diffs.dates[end_row]);
  out.spectrum = principal_components(out.covariance, target_index);

  const auto st = standardize(window, diffs.ids);
  out.last_standardized = st.z.row(len - 1).transpose();
  out.projection = out.spectrum.eigenvectors.col(0).dot(out.last_standardized);
  return out;
}

std::vector<double> trailing_average(std::span<const double> values, std::size_t width) {
  if (width == 0) throw Error(ErrorKind::invalid_argument, "moving-average width must be >= 1");
  std::vector<double> out;
  if (values.size() < width) return out;
  out.reserve(values.size() - width + 1);
  for (std::size_t i = width - 1; i < values.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = i + 1 - width; j <= i; ++j) sum += values[j];
    out.push_back(sum / static_cast<double>(width));
  }
  return out;
}

FeatureSeries rolling_feature(const AlignedPanel& panel, std::size_t window_length, bool smooth,
                              std::size_t target_index, unsigned workers) {
  if (target_index >= panel.cols()) {
    throw Error(ErrorKind::invalid_argument, "target series is not a panel column");
  }
  const auto diffs = differences(panel);
  const auto rows = static_cast<std::size_t>(diffs.values.rows());
  if (window_length < 2 || rows < window_length) {
    throw Error(ErrorKind::insufficient_data,
                fmt::format("panel has {} differences, window needs {}", rows, window_length));
  }

  const std::size_t first = window_length - 1;
  const std::size_t count = rows - first;
  struct Slot {
    bool ok = false;
    double projection = 0.0;
    double eigenvalue = 0.0;
  };
  std::vector<Slot> slots(count);
  parallel_for(count, workers, [&](std::size_t i) {
    try {
      const auto w = analyze_window(diffs, first + i, window_length, target_index);
      slots[i] = {true, w.projection, w.spectrum.eigenvalues(0)};
    } catch (const DegenerateWindowError&) {
      slots[i].ok = false;
    }
  });

  FeatureSeries raw;
  raw.window_length = window_length;
  for (std::size_t i = 0; i < count; ++i) {
    const Date& d = diffs.dates[first + i];
    if (!slots[i].ok) {
      raw.skipped_dates.push_back(d);
      continue;
    }
    raw.dates.push_back(d);
    raw.values.push_back(slots[i].projection);
    raw.largest_eigenvalue.push_back(slots[i].eigenvalue);
  }
  if (!smooth) return raw;

  constexpr std::size_t kSmoothing = 3;
  FeatureSeries out;
  out.window_length = window_length;
  out.smoothed = true;
  out.skipped_dates = raw.skipped_dates;
  out.values = trailing_average(raw.values, kSmoothing);
  if (!out.values.empty()) {
    out.dates.assign(raw.dates.begin() + (kSmoothing - 1), raw.dates.end());
    out.largest_eigenvalue.assign(raw.largest_eigenvalue.begin() + (kSmoothing - 1),
                                  raw.largest_eigenvalue.end());
  }
  return out;
}

}  // namespace mktlab
