#include "mktlab/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mktlab/error.hpp"

namespace mktlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ffnn::Network make_network(const ForecasterConfig& cfg, std::uint64_t seed) {
  return ffnn::Network::initialized({cfg.input_days, cfg.hidden_units, 1},
                                    {cfg.hidden_activation, ffnn::Activation::linear()}, seed);
}

}  // namespace

WalkForwardForecaster::WalkForwardForecaster(ForecasterConfig config)
    : config_(config), net_(make_network(config, config.seed)), adam_(net_, config.adam) {
  if (config_.input_days == 0 || config_.hidden_units == 0 || config_.batch_size == 0) {
    throw Error(ErrorKind::invalid_argument, "forecaster sizes must be positive");
  }
  if (!(config_.target_divisor > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "target divisor must be > 0");
  }
}

void WalkForwardForecaster::reset(std::uint64_t stream) {
  net_ = make_network(config_, config_.seed ^ (stream * 0x9e3779b97f4a7c15ULL));
  adam_ = ffnn::AdamState(net_, config_.adam);
}

double WalkForwardForecaster::forecast(std::span<const double> features,
                                       std::span<const double> changes) {
  if (changes.size() + 1 != features.size()) {
    throw Error(ErrorKind::contract_violation,
                fmt::format("forecast on day {} was given {} target changes; only {} are known",
                            features.size() - 1, changes.size(), features.size() - 1));
  }
  const std::size_t t = features.size() - 1;
  const std::size_t width = config_.input_days;
  auto window_ok = [&](std::size_t s) {
    if (s + 1 < width) return false;
    for (std::size_t i = s + 1 - width; i <= s; ++i) {
      if (!std::isfinite(features[i])) return false;
    }
    return true;
  };
  if (!window_ok(t)) return kNaN;

  // Most recent complete samples s <= t - 1, oldest first.
  std::vector<std::size_t> samples;
  for (std::size_t s = t; s-- > 0 && samples.size() < config_.batch_size;) {
    if (window_ok(s) && std::isfinite(changes[s])) samples.push_back(s);
  }
  if (samples.size() < config_.batch_size) return kNaN;
  std::reverse(samples.begin(), samples.end());

  ffnn::TrainingBatch batch;
  batch.inputs.resize(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(width));
  batch.targets.resize(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t r = 0; r < samples.size(); ++r) {
    const std::size_t s = samples[r];
    for (std::size_t c = 0; c < width; ++c) {
      batch.inputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          features[s + 1 - width + c];
    }
    batch.targets(static_cast<Eigen::Index>(r)) = changes[s] / config_.target_divisor;
  }
  const double mean = batch.inputs.mean();
  const double sd = std::sqrt((batch.inputs.array() - mean).square().mean());
  const double scale = sd > 0.0 ? sd : 1.0;
  batch.inputs = (batch.inputs.array() - mean) / scale;

  if (!config_.warm_start) reset(days_trained_ + 1);
  ffnn::train(net_, adam_, batch, config_.epochs);
  ++days_trained_;

  std::vector<double> input(width);
  for (std::size_t c = 0; c < width; ++c) input[c] = (features[t + 1 - width + c] - mean) / scale;
  return ffnn::forward(net_, input) * config_.target_divisor;
}

std::vector<double> feature_on_calendar(std::span<const Date> dates, const FeatureSeries& feature) {
  std::vector<double> out(dates.size(), kNaN);
  for (std::size_t i = 0; i < feature.dates.size(); ++i) {
    const auto it = std::lower_bound(dates.begin(), dates.end(), feature.dates[i]);
    if (it == dates.end() || *it != feature.dates[i]) {
      throw Error(ErrorKind::shape,
                  fmt::format("feature date {} is not on the panel calendar", feature.dates[i].iso()));
    }
    out[static_cast<std::size_t>(it - dates.begin())] = feature.values[i];
  }
  return out;
}

std::vector<double> walk_forward_forecasts(std::span<const Date> dates,
                                           std::span<const double> closes,
                                           const FeatureSeries& feature,
                                           std::span<const std::size_t> decision_rows,
                                           const ForecasterConfig& config) {
  if (closes.size() != dates.size()) {
    throw Error(ErrorKind::shape, "closes and calendar differ in length");
  }
  const auto on_calendar = feature_on_calendar(dates, feature);
  std::vector<double> changes(dates.size() > 0 ? dates.size() - 1 : 0);
  for (std::size_t s = 0; s + 1 < dates.size(); ++s) changes[s] = closes[s + 1] - closes[s];

  WalkForwardForecaster model(config);
  std::vector<double> out;
  out.reserve(decision_rows.size());
  std::size_t previous = 0;
  for (std::size_t i = 0; i < decision_rows.size(); ++i) {
    const std::size_t t = decision_rows[i];
    if (t >= dates.size() || (i > 0 && t <= previous)) {
      throw Error(ErrorKind::range, "decision rows must be increasing and on the calendar");
    }
    previous = t;
    out.push_back(model.forecast(std::span<const double>(on_calendar).first(t + 1),
                                 std::span<const double>(changes).first(t)));
  }
  return out;
}

}  // namespace mktlab
