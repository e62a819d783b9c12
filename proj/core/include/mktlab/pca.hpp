#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mktlab/date.hpp"
#include "mktlab/ingest.hpp"

namespace mktlab {

/// One-day differences x(t+1) - x(t) of every panel column, dated by the
/// later row. Rows are days, columns follow the panel.
struct PanelDifferences {
  std::vector<Date> dates;
  std::vector<std::string> ids;
  Eigen::MatrixXd values;
};

[[nodiscard]] PanelDifferences differences(const AlignedPanel& panel);

/// Correlation-normalized covariance over one window:
/// M(i, j) = < (x_i - mean_i)(x_j - mean_j) > / (sigma_i sigma_j).
struct CovarianceMatrix {
  Eigen::MatrixXd entries;
  Date window_start;
  Date window_end;
  std::vector<std::string> series_ids;
};

/// `window` holds observations in rows. Throws DegenerateWindowError naming
/// the first series whose window standard deviation is zero.
[[nodiscard]] CovarianceMatrix covariance_matrix(const Eigen::Ref<const Eigen::MatrixXd>& window,
                                                 std::vector<std::string> series_ids,
                                                 Date window_start = {}, Date window_end = {});

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // column i pairs with eigenvalues(i), unit norm
};

/// Full symmetric eigen-decomposition sorted by descending eigenvalue. Each
/// eigenvector is oriented so its entry on `target_index` is non-positive;
/// when that entry is numerically zero the largest-magnitude entry is made
/// negative instead.
[[nodiscard]] EigenDecomposition principal_components(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                                      std::size_t target_index = 0);
[[nodiscard]] EigenDecomposition principal_components(const CovarianceMatrix& m,
                                                      std::size_t target_index = 0);

/// Everything computed for the window that ends on one row of differences.
struct WindowAnalysis {
  CovarianceMatrix covariance;
  EigenDecomposition spectrum;
  Eigen::VectorXd last_standardized;  // last row of the window, standardized
  double projection = 0.0;            // top loading . last_standardized
};

[[nodiscard]] WindowAnalysis analyze_window(const PanelDifferences& diffs, std::size_t end_row,
                                            std::size_t window_length, std::size_t target_index);

/// First-principal-component feature, one value per eligible date.
struct FeatureSeries {
  std::vector<Date> dates;
  std::vector<double> values;
  std::vector<double> largest_eigenvalue;
  std::size_t window_length = 0;
  bool smoothed = false;
  std::vector<Date> skipped_dates;
};

/// For every difference row t with a full window behind it, project the
/// standardized row t onto the top loading of the window ending at t. With
/// `smooth`, values become the trailing mean of the last three projections
/// (the eigenvalue column stays raw). Windows with a constant series are
/// skipped and listed in skipped_dates.
[[nodiscard]] FeatureSeries rolling_feature(const AlignedPanel& panel, std::size_t window_length,
                                            bool smooth, std::size_t target_index = 0,
                                            unsigned workers = 1);

/// Trailing moving average; the first `width - 1` inputs produce no output.
[[nodiscard]] std::vector<double> trailing_average(std::span<const double> values,
                                                   std::size_t width);

}  // namespace mktlab
