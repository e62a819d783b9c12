#include "mktlab/strategy.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mktlab/error.hpp"
#include "mktlab/stats.hpp"

namespace mktlab {

std::string to_string(Position p) {
  switch (p) {
    case Position::long_side: return "long";
    case Position::short_side: return "short";
    case Position::flat: return "flat";
  }
  return "flat";
}

std::string to_string(KurtosisConvention k) {
  return k == KurtosisConvention::raw ? "raw" : "excess";
}

Position decide(double forecast_5, double forecast_10, const StrategyConfig& cfg) {
  if (!std::isfinite(forecast_5) || !std::isfinite(forecast_10)) return Position::flat;
  const double t = cfg.threshold_points;
  bool up = false;
  bool down = false;
  if (cfg.agreement_required) {
    up = forecast_5 > t && forecast_10 > t;
    down = forecast_5 < -t && forecast_10 < -t;
  } else {
    const double mean = 0.5 * (forecast_5 + forecast_10);
    up = mean > t;
    down = mean < -t;
  }
  if (up) return Position::long_side;
  if (down && !cfg.long_only) return Position::short_side;
  return Position::flat;
}

void LossRegularizer::observe(double signal_pnl) {
  if (n_l_ == 0) return;
  if (state_.mode == RegularizerMode::active) {
    if (signal_pnl < 0.0) {
      if (++state_.loss_streak >= n_l_) {
        state_ = {RegularizerMode::suspended, 0, 0};
      }
    } else {
      state_.loss_streak = 0;
    }
    return;
  }
  if (signal_pnl > 0.0) {
    ++state_.gain_streak;
  } else {
    state_.gain_streak = 0;
  }
  if (state_.gain_streak >= n_g_) state_ = {RegularizerMode::active, 0, 0};
}

std::vector<RegularizerState> apply_regularizer(std::span<const double> signal_pnl,
                                                const StrategyConfig& cfg) {
  LossRegularizer reg(cfg.n_l, cfg.n_g);
  std::vector<RegularizerState> out;
  out.reserve(signal_pnl.size());
  for (double pnl : signal_pnl) {
    out.push_back(reg.state());
    reg.observe(pnl);
  }
  return out;
}

PerformanceStats performance(const EquityCurve& curve, KurtosisConvention kurtosis) {
  if (curve.daily_return.size() < 2) {
    throw Error(ErrorKind::insufficient_data, "performance needs at least two days");
  }
  if (curve.capital.size() != curve.daily_return.size() + 1) {
    throw Error(ErrorKind::shape, "equity curve needs one more capital value than returns");
  }
  const auto m = stats::moments(curve.daily_return);
  PerformanceStats out;
  out.mean_daily_return = m.mean;
  out.volatility = m.stddev;
  out.skewness = m.skewness;
  out.kurtosis = kurtosis == KurtosisConvention::excess ? m.kurtosis - 3.0 : m.kurtosis;
  out.kurtosis_convention = kurtosis;
  out.days = curve.daily_return.size();
  out.total_return = curve.capital.back() / curve.capital.front() - 1.0;
  out.monthly_return =
      std::pow(1.0 + out.total_return, kTradingDaysPerMonth / static_cast<double>(out.days)) - 1.0;
  return out;
}

BacktestResult run_strategy(std::span<const DailyForecast> forecasts,
                            std::span<const double> market_returns,
                            std::span<const Date> close_dates, const StrategyConfig& cfg,
                            KurtosisConvention kurtosis) {
  if (forecasts.size() != market_returns.size() || forecasts.size() != close_dates.size()) {
    throw Error(ErrorKind::shape,
                fmt::format("{} forecasts, {} market returns and {} close dates", forecasts.size(),
                            market_returns.size(), close_dates.size()));
  }
  if (cfg.threshold_points < 0.0) throw Error(ErrorKind::invalid_argument, "threshold must be >= 0");

  BacktestResult result;
  result.config = cfg;
  result.ledger.reserve(forecasts.size());
  auto& eq = result.equity;
  eq.capital.push_back(1.0);
  if (!forecasts.empty()) eq.dates.push_back(forecasts.front().date);

  LossRegularizer reg(cfg.n_l, cfg.n_g);
  Position held = Position::flat;
  double capital = 1.0;
  for (std::size_t t = 0; t < forecasts.size(); ++t) {
    const auto& f = forecasts[t];
    for (const auto& used : {f.feature_date_5, f.feature_date_10}) {
      if (used && *used > f.date) {
        throw Error(ErrorKind::contract_violation,
                    fmt::format("forecast for {} used a feature dated {}", f.date.iso(), used->iso()));
      }
    }
    if (t > 0 && !(forecasts[t - 1].date < f.date)) {
      throw Error(ErrorKind::shape, "forecast dates must be strictly increasing");
    }
    if (!(close_dates[t] > f.date)) {
      throw Error(ErrorKind::shape,
                  fmt::format("return for {} closes on {}", f.date.iso(), close_dates[t].iso()));
    }

    LedgerRow row;
    row.date = f.date;
    row.forecast_5 = f.forecast_5;
    row.forecast_10 = f.forecast_10;
    row.signal = decide(f.forecast_5, f.forecast_10, cfg);
    row.regularizer = reg.state();
    row.position = reg.active() ? row.signal : Position::flat;
    row.market_return = market_returns[t];

    const double exposure = static_cast<double>(static_cast<int>(row.position));
    const double turnover =
        std::abs(static_cast<double>(static_cast<int>(row.position) - static_cast<int>(held)));
    row.strategy_return = exposure * row.market_return - cfg.cost_per_change * turnover;
    capital *= 1.0 + row.strategy_return;
    row.capital = capital;
    held = row.position;

    reg.observe(static_cast<double>(static_cast<int>(row.signal)) * row.market_return);

    eq.dates.push_back(close_dates[t]);
    eq.capital.push_back(capital);
    eq.daily_return.push_back(row.strategy_return);
    result.ledger.push_back(row);
  }
  result.stats = performance(eq, kurtosis);
  return result;
}

WalkForwardRun walk_forward(const AlignedPanel& panel, std::size_t target_index,
                            const FeatureSeries& features_5, const FeatureSeries& features_10,
                            std::size_t days, const ForecasterConfig& net_5,
                            const ForecasterConfig& net_10) {
  const std::size_t rows = panel.rows();
  if (days < 2 || rows < days + 1) {
    throw Error(ErrorKind::insufficient_data,
                fmt::format("panel has {} rows; a {}-day backtest needs {}", rows, days, days + 1));
  }
  const auto dates = panel.dates();
  const auto closes = panel.column(target_index);

  WalkForwardRun run;
  for (std::size_t t = rows - 1 - days; t + 1 < rows; ++t) run.decision_rows.push_back(t);

  const auto f5 = walk_forward_forecasts(dates, closes, features_5, run.decision_rows, net_5);
  const auto f10 = walk_forward_forecasts(dates, closes, features_10, run.decision_rows, net_10);

  double growth = 1.0;
  for (std::size_t i = 0; i < run.decision_rows.size(); ++i) {
    const std::size_t t = run.decision_rows[i];
    run.forecasts.push_back({dates[t], f5[i], f10[i], dates[t], dates[t]});
    const double r = closes[t + 1] / closes[t] - 1.0;
    run.market_returns.push_back(r);
    run.close_dates.push_back(dates[t + 1]);
    growth *= 1.0 + r;
  }
  run.buy_and_hold_return = growth - 1.0;
  return run;
}

BacktestResult backtest(const AlignedPanel& panel, std::size_t target_index,
                        const FeatureSeries& features_5, const FeatureSeries& features_10,
                        std::size_t days, const ForecasterConfig& net_5,
                        const ForecasterConfig& net_10, const StrategyConfig& cfg) {
  const auto run = walk_forward(panel, target_index, features_5, features_10, days, net_5, net_10);
  return run_strategy(run.forecasts, run.market_returns, run.close_dates, cfg);
}

std::vector<GridEntry> regularizer_grid(const WalkForwardRun& run, const StrategyConfig& base,
                                        KurtosisConvention kurtosis) {
  std::vector<GridEntry> out;
  for (std::size_t n_l : {1u, 2u}) {
    for (std::size_t n_g : {0u, 1u, 2u, 3u}) {
      StrategyConfig cfg = base;
      cfg.n_l = n_l;
      cfg.n_g = n_g;
      out.push_back({n_l, n_g,
                     run_strategy(run.forecasts, run.market_returns, run.close_dates, cfg, kurtosis)});
    }
  }
  return out;
}

}  // namespace mktlab
