#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mktlab/date.hpp"
#include "mktlab/ffnn.hpp"
#include "mktlab/pca.hpp"

namespace mktlab {

struct ForecasterConfig {
  std::size_t input_days = 5;
  std::size_t hidden_units = 30;
  std::size_t batch_size = 20;
  std::size_t epochs = 200;
  /// Targets are divided by this before training and predictions multiplied
  /// back, so forecasts come out in index points.
  double target_divisor = 1000.0;
  ffnn::Activation hidden_activation = ffnn::Activation::tanh();
  ffnn::AdamConfig adam{};
  /// Keep yesterday's weights and optimizer state (true) or start every day
  /// from a fresh seeded initialization.
  bool warm_start = true;
  std::uint64_t seed = 1;
};

/// Daily retrained next-day predictor driven by one feature series.
///
/// A training sample for day s pairs the features of days s-4..s with the
/// target change close(s+1) - close(s). On day t only samples with s <= t-1
/// exist, so the trailing batch never sees the move being predicted.
/// Inputs are standardized with the batch's own mean and deviation.
class WalkForwardForecaster {
 public:
  explicit WalkForwardForecaster(ForecasterConfig config);

  /// `features[s]` for days 0..t and `changes[s]` for days 0..t-1, so
  /// `changes.size() + 1 == features.size()`. Returns the predicted change
  /// from day t to t+1 in points, or NaN when a needed feature is missing
  /// (NaN) or fewer than batch_size complete samples exist.
  double forecast(std::span<const double> features, std::span<const double> changes);

  [[nodiscard]] const ffnn::Network& network() const noexcept { return net_; }
  [[nodiscard]] const ForecasterConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::size_t days_trained() const noexcept { return days_trained_; }

 private:
  void reset(std::uint64_t stream);

  ForecasterConfig config_;
  ffnn::Network net_;
  ffnn::AdamState adam_;
  std::size_t days_trained_ = 0;
};

/// Place a feature series on the panel calendar: entry r holds the feature
/// dated dates[r], NaN where the feature has no value. Throws a shape error if
/// a feature date is not on the calendar.
[[nodiscard]] std::vector<double> feature_on_calendar(std::span<const Date> dates,
                                                      const FeatureSeries& feature);

/// Run a forecaster over the decision rows (strictly increasing row indices
/// into `dates`). Row t sees features[0..t] and closes[0..t] only.
[[nodiscard]] std::vector<double> walk_forward_forecasts(std::span<const Date> dates,
                                                         std::span<const double> closes,
                                                         const FeatureSeries& feature,
                                                         std::span<const std::size_t> decision_rows,
                                                         const ForecasterConfig& config);

}  // namespace mktlab
