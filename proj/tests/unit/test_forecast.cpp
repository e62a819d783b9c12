#include <doctest.h>

#include <cmath>
#include <vector>

#include "mktlab/error.hpp"
#include "mktlab/forecast.hpp"
#include "mktlab/synthetic.hpp"

using namespace mktlab;

namespace {

ForecasterConfig quick(std::size_t epochs = 20) {
  ForecasterConfig c;
  c.epochs = epochs;
  c.seed = 3;
  return c;
}

FeatureSeries feature_from(const std::vector<Date>& dates, const std::vector<double>& values) {
  FeatureSeries f;
  f.dates = dates;
  f.values = values;
  f.largest_eigenvalue.assign(values.size(), 1.0);
  f.window_length = 5;
  return f;
}

}  // namespace

TEST_SUITE("forecast") {

TEST_CASE("NaN until a full batch exists") {
  WalkForwardForecaster m(quick());
  const auto feat = synthetic::gaussian(40, 1);
  const std::vector<double> changes(39, 10.0);
  // samples need s >= 4 and s <= t - 1, so a batch of 20 first exists at t = 24
  for (std::size_t t = 0; t < 24; ++t) {
    CHECK(std::isnan(m.forecast(std::span(feat).first(t + 1), std::span(changes).first(t))));
  }
  CHECK(m.days_trained() == 0);
  CHECK(std::isfinite(m.forecast(std::span(feat).first(25), std::span(changes).first(24))));
  CHECK(m.days_trained() == 1);
}

TEST_CASE("missing features give NaN") {
  WalkForwardForecaster m(quick());
  auto feat = synthetic::gaussian(40, 2);
  const std::vector<double> changes(39, 10.0);
  feat[37] = std::nan("");
  CHECK(std::isnan(m.forecast(std::span(feat).first(40), std::span(changes).first(39))));
}

TEST_CASE("being handed tomorrow's change is a contract violation") {
  WalkForwardForecaster m(quick());
  const auto feat = synthetic::gaussian(30, 3);
  const std::vector<double> changes(30, 1.0);
  try {
    (void)m.forecast(feat, changes);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::contract_violation);
  }
}

TEST_CASE("learns a constant drift in points") {
  WalkForwardForecaster m(quick(200));
  const auto feat = synthetic::gaussian(60, 4);
  const std::vector<double> changes(59, 300.0);
  double last = 0.0;
  for (std::size_t t = 24; t < 60; ++t) {
    last = m.forecast(std::span(feat).first(t + 1), std::span(changes).first(t));
  }
  CHECK(last == doctest::Approx(300.0).epsilon(0.1));
}

TEST_CASE("deterministic, and cold start differs from warm start") {
  const auto feat = synthetic::gaussian(50, 5);
  const auto changes = synthetic::gaussian(49, 6);
  auto run = [&](bool warm) {
    auto c = quick();
    c.warm_start = warm;
    WalkForwardForecaster m(c);
    std::vector<double> out;
    for (std::size_t t = 24; t < 50; ++t) {
      out.push_back(m.forecast(std::span(feat).first(t + 1), std::span(changes).first(t)));
    }
    return out;
  };
  CHECK(run(true) == run(true));
  CHECK(run(false) == run(false));
  CHECK(run(true) != run(false));
}

TEST_CASE("feature placement on the calendar") {
  const auto dates = synthetic::business_days(Date{2020, 1, 6}, 10);
  const auto f = feature_from({dates[2], dates[5]}, {1.5, -2.0});
  const auto placed = feature_on_calendar(dates, f);
  CHECK(placed[2] == 1.5);
  CHECK(placed[5] == -2.0);
  CHECK(std::isnan(placed[0]));
  CHECK(std::isnan(placed[9]));
  const auto off = feature_from({Date{2020, 1, 11}}, {1.0});  // a Saturday
  CHECK_THROWS_AS((void)feature_on_calendar(dates, off), Error);
}

TEST_CASE("walk-forward forecasts ignore everything after their day") {
  const std::size_t rows = 70;
  const auto dates = synthetic::business_days(Date{2020, 1, 6}, rows);
  auto closes = synthetic::gaussian(rows, 7);
  for (std::size_t i = 1; i < rows; ++i) closes[i] = closes[i - 1] + 100.0 * closes[i];
  const auto f = feature_from(dates, synthetic::gaussian(rows, 8));
  std::vector<std::size_t> decision;
  for (std::size_t t = 30; t + 1 < rows; ++t) decision.push_back(t);

  const auto base = walk_forward_forecasts(dates, closes, f, decision, quick());
  CHECK(base == walk_forward_forecasts(dates, closes, f, decision, quick()));

  const std::size_t cut = 45;
  auto mutated = closes;
  auto feat_mutated = f;
  for (std::size_t i = cut + 1; i < rows; ++i) {
    mutated[i] = -mutated[i] * 3.0 + 17.0;
    feat_mutated.values[i] = 1e3;
  }
  const auto other = walk_forward_forecasts(dates, mutated, feat_mutated, decision, quick());
  for (std::size_t i = 0; i < decision.size(); ++i) {
    CAPTURE(decision[i]);
    if (decision[i] <= cut) {
      CHECK(other[i] == base[i]);
    } else {
      CHECK(other[i] != base[i]);
    }
  }

  const std::vector<std::size_t> bad{40, 40};
  CHECK_THROWS_AS((void)walk_forward_forecasts(dates, closes, f, bad, quick()), Error);
}

}  // TEST_SUITE
