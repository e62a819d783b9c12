#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mktlab/date.hpp"
#include "mktlab/forecast.hpp"
#include "mktlab/ingest.hpp"
#include "mktlab/pca.hpp"

namespace mktlab {

enum class Position : int { short_side = -1, flat = 0, long_side = 1 };

[[nodiscard]] std::string to_string(Position p);

struct StrategyConfig {
  double threshold_points = 500.0;
  bool long_only = true;
  /// Consecutive losing traded days before trading is suspended; 0 disables.
  std::size_t n_l = 0;
  /// Consecutive shadow gain days needed to resume.
  std::size_t n_g = 0;
  /// Require both forecasts past the threshold in the same direction. When
  /// false the mean of the two forecasts is compared with the threshold.
  bool agreement_required = true;
  /// Fractional cost charged on every change of held position.
  double cost_per_change = 0.0;
};

/// long iff both forecasts > +threshold, short iff both < -threshold and
/// shorting is allowed, flat otherwise. NaN forecasts give flat.
[[nodiscard]] Position decide(double forecast_5, double forecast_10, const StrategyConfig& cfg);

enum class RegularizerMode { active, suspended };

struct RegularizerState {
  RegularizerMode mode = RegularizerMode::active;
  std::size_t loss_streak = 0;
  std::size_t gain_streak = 0;  // shadow gains while suspended

  friend bool operator==(const RegularizerState&, const RegularizerState&) = default;
};

/// Loss regularization state machine.
///
/// While active, n_l consecutive days with negative signal P&L suspend
/// trading from the next day on. While suspended the P&L the signal would
/// have made keeps being observed; n_g consecutive positive days reactivate
/// trading from the next day (n_g = 0: after exactly one suspended day).
/// A zero P&L day (including a flat signal) breaks both streaks.
class LossRegularizer {
 public:
  LossRegularizer(std::size_t n_l, std::size_t n_g) : n_l_(n_l), n_g_(n_g) {}

  [[nodiscard]] const RegularizerState& state() const noexcept { return state_; }
  [[nodiscard]] bool active() const noexcept { return state_.mode == RegularizerMode::active; }

  /// Feed the day's signal P&L (realized when active, shadow when suspended).
  void observe(double signal_pnl);

 private:
  std::size_t n_l_;
  std::size_t n_g_;
  RegularizerState state_;
};

/// State in effect on each day for a sequence of daily signal P&L values;
/// entry t is the state before pnl[t] is observed.
[[nodiscard]] std::vector<RegularizerState> apply_regularizer(std::span<const double> signal_pnl,
                                                              const StrategyConfig& cfg);

struct DailyForecast {
  Date date;
  double forecast_5 = 0.0;
  double forecast_10 = 0.0;
  /// Latest feature date each forecast relied on; must not exceed `date`.
  std::optional<Date> feature_date_5;
  std::optional<Date> feature_date_10;
};

struct LedgerRow {
  Date date;
  double forecast_5 = 0.0;
  double forecast_10 = 0.0;
  Position signal = Position::flat;
  Position position = Position::flat;
  double market_return = 0.0;
  double strategy_return = 0.0;
  double capital = 1.0;
  RegularizerState regularizer;
};

struct EquityCurve {
  /// dates[0] is the first decision day; dates[k] closes the k-th day.
  std::vector<Date> dates;
  std::vector<double> capital;
  std::vector<double> daily_return;
};

enum class KurtosisConvention { raw, excess };

[[nodiscard]] std::string to_string(KurtosisConvention k);

struct PerformanceStats {
  double mean_daily_return = 0.0;
  double volatility = 0.0;
  double skewness = 0.0;  // NaN when volatility is zero
  double kurtosis = 0.0;  // NaN when volatility is zero
  KurtosisConvention kurtosis_convention = KurtosisConvention::raw;
  double monthly_return = 0.0;
  double total_return = 0.0;
  std::size_t days = 0;
};

/// Trading days per month used to convert total into monthly return.
inline constexpr double kTradingDaysPerMonth = 21.0;

/// Population moments of daily_return; total = capital_end / capital_start - 1
/// and monthly = (1 + total)^(21 / days) - 1.
[[nodiscard]] PerformanceStats performance(const EquityCurve& curve,
                                           KurtosisConvention kurtosis = KurtosisConvention::raw);

struct BacktestResult {
  StrategyConfig config;
  std::vector<LedgerRow> ledger;
  EquityCurve equity;
  PerformanceStats stats;
};

/// Apply the decision rule, regularizer and compounding to precomputed
/// forecasts. `market_returns[t]` is close(t+1)/close(t) - 1 for the day
/// `forecasts[t].date`; `close_dates[t]` is the date of close(t+1). Throws a
/// contract violation if a forecast used a feature dated after its day.
[[nodiscard]] BacktestResult run_strategy(std::span<const DailyForecast> forecasts,
                                          std::span<const double> market_returns,
                                          std::span<const Date> close_dates,
                                          const StrategyConfig& cfg,
                                          KurtosisConvention kurtosis = KurtosisConvention::raw);

/// The two feature variants and their forecasts on the decision days.
struct WalkForwardRun {
  std::vector<std::size_t> decision_rows;
  std::vector<DailyForecast> forecasts;
  std::vector<double> market_returns;
  std::vector<Date> close_dates;
  double buy_and_hold_return = 0.0;
};

/// Forecast the last `days` tradable days of the panel's target column with
/// two independently trained walk-forward networks, one per feature series.
[[nodiscard]] WalkForwardRun walk_forward(const AlignedPanel& panel, std::size_t target_index,
                                          const FeatureSeries& features_5,
                                          const FeatureSeries& features_10, std::size_t days,
                                          const ForecasterConfig& net_5,
                                          const ForecasterConfig& net_10);

/// walk_forward followed by run_strategy.
[[nodiscard]] BacktestResult backtest(const AlignedPanel& panel, std::size_t target_index,
                                      const FeatureSeries& features_5,
                                      const FeatureSeries& features_10, std::size_t days,
                                      const ForecasterConfig& net_5,
                                      const ForecasterConfig& net_10, const StrategyConfig& cfg);

struct GridEntry {
  std::size_t n_l = 0;
  std::size_t n_g = 0;
  BacktestResult result;
};

/// The eight regularizer settings n_l in {1, 2} x n_g in {0, 1, 2, 3} on one
/// set of forecasts; every other setting comes from `base`.
[[nodiscard]] std::vector<GridEntry> regularizer_grid(const WalkForwardRun& run,
                                                      const StrategyConfig& base,
                                                      KurtosisConvention kurtosis =
                                                          KurtosisConvention::raw);

}  // namespace mktlab
