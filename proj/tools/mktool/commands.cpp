#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <fmt/format.h>
#include <json.hpp>

#include "mktlab/correlation.hpp"
#include "mktlab/dcca.hpp"
#include "mktlab/error.hpp"
#include "mktlab/ingest.hpp"
#include "mktlab/levy.hpp"
#include "mktlab/manifest.hpp"
#include "mktlab/parallel.hpp"
#include "mktlab/pca.hpp"
#include "mktlab/stats.hpp"
#include "mktlab/strategy.hpp"
#include "mktlab/svg_plot.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace mktool {

namespace {

using mktlab::Error;
using mktlab::ErrorKind;

struct CommonOptions {
  std::string manifest;
  std::string from;
  std::string to;
  std::uint64_t seed = 1;
  std::string out = "out";
  unsigned workers = 1;
};

struct Context {
  mktlab::PanelManifest manifest;
  mktlab::AlignedPanel panel;
  std::size_t target = 0;
};

[[noreturn]] void usage(const std::string& message) {
  throw Error(ErrorKind::invalid_argument, message);
}

std::optional<mktlab::Date> date_flag(const std::string& text, const char* name) {
  if (text.empty()) return std::nullopt;
  auto d = mktlab::parse_date(text);
  if (!d) usage(fmt::format("{} expects YYYY-MM-DD, got '{}'", name, text));
  return d;
}

Context load_context(const CommonOptions& opt) {
  if (opt.manifest.empty()) usage("--manifest is required");
  if (!fs::is_regular_file(opt.manifest)) usage(fmt::format("manifest '{}' not found", opt.manifest));
  auto manifest = mktlab::load_manifest(opt.manifest);
  auto panel = mktlab::load_panel(manifest);
  const auto from = date_flag(opt.from, "--from");
  const auto to = date_flag(opt.to, "--to");
  if (from && to && *to < *from) usage("--to is before --from");
  if (from || to) panel = panel.slice(from, to);
  if (panel.rows() < 3) {
    throw Error(ErrorKind::insufficient_data,
                fmt::format("only {} aligned rows in the requested range", panel.rows()));
  }
  const std::size_t target = panel.index_of(manifest.target);
  return {std::move(manifest), std::move(panel), target};
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) usage(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Collected outputs of one command, flushed together with run.json.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void text(const std::string& name, const std::string& body) {
    write_text(dir_ / name, body);
    files_.push_back(name);
  }
  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }
  void svg(const std::string& name, const mktlab::SvgPlot& plot) { text(name, plot.render()); }

  void manifest(const std::string& command, const CommonOptions& opt, json parameters) {
    json run;
    run["command"] = command;
    run["version"] = MKTOOL_VERSION;
    run["seed"] = opt.seed;
    run["manifest"] = opt.manifest;
    run["from"] = opt.from.empty() ? json(nullptr) : json(opt.from);
    run["to"] = opt.to.empty() ? json(nullptr) : json(opt.to);
    run["parameters"] = std::move(parameters);
    run["outputs"] = files_;
    run["libraries"] = {
        {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                              EIGEN_MINOR_VERSION)},
        {"fmt", FMT_VERSION},
        {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                      NLOHMANN_JSON_VERSION_MINOR, NLOHMANN_JSON_VERSION_PATCH)},
        {"cli11", CLI11_VERSION},
    };
    write_json(dir_ / "run.json", run);
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

mktlab::ReducedSeries reduced_returns(const mktlab::AlignedPanel& panel, std::size_t k) {
  return mktlab::reduce(mktlab::log_returns(panel.series(k)));
}

std::vector<double> as_double(std::span<const std::size_t> xs) {
  return {xs.begin(), xs.end()};
}

// ---------------------------------------------------------------- corr

struct CorrOptions {
  std::size_t lags = 20;
  bool absolute = false;
  double confidence = 0.95;
};

int cmd_corr(const CommonOptions& opt, const CorrOptions& c) {
  if (!(c.confidence > 0.0 && c.confidence < 1.0)) usage("--confidence must be in (0, 1)");
  const auto ctx = load_context(opt);
  Outputs out(opt.out);
  const auto target = reduced_returns(ctx.panel, ctx.target);
  const double band = mktlab::noise_band(target.values.size(), c.confidence);

  mktlab::SvgPlot plot(c.absolute ? "Correlation of |returns|" : "Correlation of returns", "lag",
                       "C(n)");
  std::vector<std::size_t> order{ctx.target};
  for (std::size_t k = 0; k < ctx.panel.cols(); ++k) {
    if (k != ctx.target) order.push_back(k);
  }
  for (std::size_t k : order) {
    const auto other = k == ctx.target ? target : reduced_returns(ctx.panel, k);
    const auto cf = mktlab::cross_correlation(target, other, c.lags, c.absolute);
    std::string csv = "lag,correlation,noise_band\n";
    for (std::size_t i = 0; i < cf.lags.size(); ++i) {
      csv += fmt::format("{},{},{}\n", cf.lags[i], num(cf.values[i]), num(band));
    }
    out.text(fmt::format("corr{}_{}_{}.csv", c.absolute ? "_abs" : "", cf.first_id, cf.second_id),
             csv);
    std::vector<double> lags(cf.lags.begin(), cf.lags.end());
    plot.add_series(fmt::format("{} x {}", cf.first_id, cf.second_id), lags, cf.values);
  }
  const std::vector<double> edge{0.0, static_cast<double>(c.lags)};
  plot.add_series("+band", edge, std::vector<double>{band, band});
  plot.add_series("-band", edge, std::vector<double>{-band, -band});
  out.svg(c.absolute ? "corr_abs.svg" : "corr.svg", plot);
  out.manifest("corr", opt,
               {{"lags", c.lags}, {"absolute", c.absolute}, {"confidence", c.confidence}});
  return kOk;
}

// ---------------------------------------------------------------- dcca

struct DccaOptions {
  std::size_t box_min = 4;
  std::size_t box_max = 0;  // 0: N / 4
  double box_ratio = 1.189207115002721;
  std::size_t fit_min = 0;  // 0: smallest box
  std::size_t fit_max = 0;  // 0: largest box
};

int cmd_dcca(const CommonOptions& opt, const DccaOptions& d) {
  if (d.box_min < 2) usage("--box-min must be at least 2");
  if (!(d.box_ratio > 1.0)) usage("--box-ratio must exceed 1");
  const auto ctx = load_context(opt);
  Outputs out(opt.out);
  const auto target = reduced_returns(ctx.panel, ctx.target);
  const std::size_t n = target.values.size();

  auto boxes = mktlab::default_box_sizes(n, d.box_min, d.box_ratio);
  if (d.box_max > 0) std::erase_if(boxes, [&](std::size_t b) { return b > d.box_max; });
  if (boxes.size() < 3) usage("fewer than three box sizes in range");
  const std::size_t fit_min = d.fit_min > 0 ? d.fit_min : boxes.front();
  const std::size_t fit_max = d.fit_max > 0 ? d.fit_max : boxes.back();
  if (fit_max <= fit_min) usage("--fit-max must exceed --fit-min");

  mktlab::SvgPlot plot("Detrended fluctuation", "n", "F2(n)");
  plot.log_x().log_y();
  json summary = json::array();
  std::vector<std::size_t> order{ctx.target};
  for (std::size_t k = 0; k < ctx.panel.cols(); ++k) {
    if (k != ctx.target) order.push_back(k);
  }
  for (std::size_t k : order) {
    const auto other = k == ctx.target ? target : reduced_returns(ctx.panel, k);
    const auto curve = mktlab::dcca_f2(target, other, boxes, opt.workers);
    std::string csv = "n,F2\n";
    for (std::size_t i = 0; i < curve.box_sizes.size(); ++i) {
      csv += fmt::format("{},{}\n", curve.box_sizes[i], num(curve.f2[i]));
    }
    out.text(fmt::format("dcca_{}_{}.csv", curve.first_id, curve.second_id), csv);
    plot.add_series(fmt::format("{} x {}", curve.first_id, curve.second_id),
                    as_double(curve.box_sizes), curve.f2);

    json entry;
    entry["pair"] = {curve.first_id, curve.second_id};
    entry["fit_range"] = {fit_min, fit_max};
    try {
      const auto fit = mktlab::fit_power_law(curve, fit_min, fit_max);
      entry["power_law"] = true;
      entry["lambda"] = fit.lambda;
      entry["lambda_stderr"] = fit.slope_stderr / 2.0;
      entry["r_squared"] = fit.r_squared;
      entry["used_points"] = fit.used_points;
      entry["excluded_points"] = fit.excluded_points;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::fit) throw;
      // mostly negative cross curves: report, do not fail the run
      entry["power_law"] = false;
      entry["reason"] = e.what();
    }
    summary.push_back(entry);
  }
  out.json_file("dcca_summary.json", {{"series_length", n}, {"pairs", summary}});
  out.svg("dcca.svg", plot);
  out.manifest("dcca", opt,
               {{"box_sizes", boxes}, {"box_ratio", d.box_ratio}, {"fit_min", fit_min},
                {"fit_max", fit_max}});
  return kOk;
}

// ---------------------------------------------------------------- levy

struct LevyOptions {
  std::string series;
  std::size_t realizations = 5000;
  std::vector<std::size_t> n_values{1, 2, 4, 8, 16, 32, 64, 128, 256};
  std::size_t fit_min = 1;
  std::size_t fit_max = 16;
  double bin_width = 0.0;  // 0: 0.1 sigma
};

int cmd_levy(const CommonOptions& opt, LevyOptions l) {
  if (l.realizations == 0) usage("--realizations must be positive");
  if (l.bin_width < 0.0) usage("--bin-width must be positive");
  std::sort(l.n_values.begin(), l.n_values.end());
  l.n_values.erase(std::unique(l.n_values.begin(), l.n_values.end()), l.n_values.end());
  if (l.n_values.empty() || l.n_values.front() == 0) usage("--n-values must be positive");
  const auto ctx = load_context(opt);
  const std::size_t k = l.series.empty() ? ctx.target : ctx.panel.index_of(l.series);
  const auto returns = mktlab::log_returns(ctx.panel.series(k));
  if (returns.values.size() < l.n_values.back()) {
    throw Error(ErrorKind::insufficient_data,
                fmt::format("{} returns cannot fill a block of {}", returns.values.size(),
                            l.n_values.back()));
  }
  const double bin = l.bin_width > 0.0 ? l.bin_width : mktlab::default_bin_width(returns.values);
  Outputs out(opt.out);
  const auto curve = mktlab::return_to_origin(returns.values, l.n_values, l.realizations, bin,
                                              opt.seed, opt.workers);
  std::string csv = "n,p_zero,stderr\n";
  for (std::size_t i = 0; i < curve.n_values.size(); ++i) {
    csv += fmt::format("{},{},{}\n", curve.n_values[i], num(curve.p_zero[i]),
                       num(curve.std_error[i]));
  }
  out.text("levy.csv", csv);
  const auto est = mktlab::estimate_alpha(curve, l.fit_min, l.fit_max);
  json summary;
  summary["series"] = returns.id;
  summary["alpha"] = est.alpha;
  summary["slope"] = est.slope;
  summary["stderr"] = est.alpha_stderr;
  summary["slope_stderr"] = est.slope_stderr;
  summary["r_squared"] = est.r_squared;
  summary["fit_range"] = {est.n_min, est.n_max};
  summary["used_points"] = est.used_points;
  summary["bin_width"] = bin;
  summary["realizations"] = l.realizations;
  summary["seed"] = opt.seed;
  out.json_file("levy.json", summary);

  mktlab::SvgPlot plot(fmt::format("Return to origin, {}", returns.id), "n", "P(X_n = 0)");
  plot.log_x().log_y();
  plot.add_series("estimate", as_double(curve.n_values), curve.p_zero);
  std::vector<double> fitted;
  for (std::size_t n : curve.n_values) {
    fitted.push_back(std::exp(est.intercept + est.slope * std::log(static_cast<double>(n))));
  }
  plot.add_series(fmt::format("fit, alpha = {:.3f}", est.alpha), as_double(curve.n_values), fitted);
  out.svg("levy.svg", plot);
  out.manifest("levy", opt,
               {{"series", returns.id}, {"realizations", l.realizations},
                {"n_values", l.n_values}, {"fit_min", l.fit_min}, {"fit_max", l.fit_max},
                {"bin_width", bin}});
  return kOk;
}

// ---------------------------------------------------------------- pca

struct PcaOptions {
  std::vector<std::size_t> windows{5, 10};
  bool raw = false;
  std::vector<std::string> loadings_dates;
};

json loadings_json(const mktlab::WindowAnalysis& w) {
  json j;
  j["date"] = w.covariance.window_end.iso();
  j["window_start"] = w.covariance.window_start.iso();
  std::vector<double> ev(w.spectrum.eigenvalues.data(),
                         w.spectrum.eigenvalues.data() + w.spectrum.eigenvalues.size());
  j["eigenvalues"] = ev;
  json rows = json::array();
  for (Eigen::Index r = 0; r < w.spectrum.eigenvectors.rows(); ++r) {
    json row;
    row["series"] = w.covariance.series_ids[static_cast<std::size_t>(r)];
    row["loading"] = w.spectrum.eigenvectors(r, 0);
    rows.push_back(row);
  }
  j["first_component"] = rows;
  j["projection"] = w.projection;
  return j;
}

int cmd_pca(const CommonOptions& opt, PcaOptions p) {
  if (p.windows.empty()) usage("--windows needs at least one length");
  for (std::size_t w : p.windows) {
    if (w < 2) usage("window lengths must be at least 2");
  }
  std::vector<mktlab::Date> requested;
  for (const auto& text : p.loadings_dates) requested.push_back(*date_flag(text, "--loadings-date"));
  const auto ctx = load_context(opt);
  const auto diffs = mktlab::differences(ctx.panel);
  Outputs out(opt.out);
  mktlab::SvgPlot plot("First principal component feature", "day", "projection");

  json params;
  for (std::size_t w : p.windows) {
    const auto feature = mktlab::rolling_feature(ctx.panel, w, !p.raw, ctx.target, opt.workers);
    std::string csv = "date,pc_value,largest_eigenvalue\n";
    for (std::size_t i = 0; i < feature.dates.size(); ++i) {
      csv += fmt::format("{},{},{}\n", feature.dates[i].iso(), num(feature.values[i]),
                         num(feature.largest_eigenvalue[i]));
    }
    out.text(fmt::format("pca_w{}.csv", w), csv);
    std::vector<double> day(feature.values.size());
    for (std::size_t i = 0; i < day.size(); ++i) day[i] = static_cast<double>(i);
    plot.add_series(fmt::format("window {}", w), day, feature.values);

    auto dates = requested;
    if (dates.empty() && !feature.dates.empty()) dates.push_back(feature.dates.back());
    json entries = json::array();
    for (const auto& date : dates) {
      const auto it = std::find(diffs.dates.begin(), diffs.dates.end(), date);
      if (it == diffs.dates.end()) usage(fmt::format("{} is not a trading day of the panel", date.iso()));
      const auto row = static_cast<std::size_t>(it - diffs.dates.begin());
      if (row + 1 < w) usage(fmt::format("{} has no full {}-day window", date.iso(), w));
      entries.push_back(loadings_json(mktlab::analyze_window(diffs, row, w, ctx.target)));
    }
    json skipped = json::array();
    for (const auto& d : feature.skipped_dates) skipped.push_back(d.iso());
    out.json_file(fmt::format("loadings_w{}.json", w),
                  {{"window", w},
                   {"target", ctx.manifest.target},
                   {"series", ctx.panel.ids()},
                   {"smoothed", feature.smoothed},
                   {"skipped_dates", skipped},
                   {"windows", entries}});
  }
  out.svg("pca.svg", plot);
  out.manifest("pca", opt,
               {{"windows", p.windows}, {"smoothed", !p.raw}, {"loadings_dates", p.loadings_dates}});
  return kOk;
}

// ---------------------------------------------------------------- backtest

struct BacktestOptions {
  std::size_t days = 700;
  double threshold = 500.0;
  bool allow_short = false;
  bool mean_rule = false;
  std::size_t n_l = 0;
  std::size_t n_g = 0;
  double cost = 0.0;
  std::string kurtosis = "raw";
  std::size_t short_window = 5;
  std::size_t long_window = 10;
  std::size_t input_days = 5;
  std::size_t hidden = 30;
  std::size_t batch = 20;
  std::size_t epochs = 200;
  double learning_rate = 1e-3;
  double target_divisor = 1000.0;
  bool cold_start = false;
};

json config_json(const mktlab::StrategyConfig& c) {
  return {{"threshold_points", c.threshold_points}, {"long_only", c.long_only},
          {"n_l", c.n_l},
          {"n_g", c.n_g},
          {"agreement_required", c.agreement_required},
          {"cost_per_change", c.cost_per_change}};
}

json stats_json(const mktlab::PerformanceStats& s) {
  return {{"mean_daily_return", s.mean_daily_return},
          {"volatility", s.volatility},
          {"skewness", number_or_null(s.skewness)},
          {"kurtosis", number_or_null(s.kurtosis)},
          {"kurtosis_convention", mktlab::to_string(s.kurtosis_convention)},
          {"monthly_return", s.monthly_return},
          {"total_return", s.total_return},
          {"days", s.days}};
}

std::string ledger_csv(const mktlab::BacktestResult& r) {
  std::string csv =
      "date,forecast_5,forecast_10,signal,position,market_return,strategy_return,capital,"
      "regularizer_state,loss_streak,gain_streak\n";
  for (const auto& row : r.ledger) {
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", row.date.iso(), num(row.forecast_5),
                       num(row.forecast_10), mktlab::to_string(row.signal),
                       mktlab::to_string(row.position), num(row.market_return),
                       num(row.strategy_return), num(row.capital),
                       row.regularizer.mode == mktlab::RegularizerMode::active ? "active"
                                                                               : "suspended",
                       row.regularizer.loss_streak, row.regularizer.gain_streak);
  }
  return csv;
}

std::string pct(double v) { return std::isfinite(v) ? fmt::format("{:.2f}%", 100.0 * v) : "n/a"; }
std::string fixed(double v, int digits) {
  return std::isfinite(v) ? fmt::format("{:.{}f}", v, digits) : "n/a";
}

std::string grid_markdown(const json& grid) {
  std::string md = fmt::format("kurtosis convention: {}\n\n", grid["kurtosis_convention"].get<std::string>());
  md += "| N_l | N_g | Monthly | Total | mean | sigma | skewness | kurtosis |\n";
  md += "|---|---|---|---|---|---|---|---|\n";
  auto value = [](const json& j) {
    return j.is_null() ? std::nan("") : j.get<double>();
  };
  auto row = [&](const std::string& nl, const std::string& ng, const json& e) {
    md += fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} |\n", nl, ng,
                      pct(value(e["monthly_return"])), pct(value(e["total_return"])),
                      fixed(value(e["mean_daily_return"]), 4), fixed(value(e["volatility"]), 3),
                      fixed(value(e["skewness"]), 2), fixed(value(e["kurtosis"]), 2));
  };
  row("-", "-", grid["unregularized"]);
  for (const auto& e : grid["configurations"]) {
    row(std::to_string(e["n_l"].get<std::size_t>()), std::to_string(e["n_g"].get<std::size_t>()),
        e);
  }
  md += fmt::format("\nbuy and hold total: {}\n", pct(grid["buy_and_hold_total_return"].get<double>()));
  return md;
}

int cmd_backtest(const CommonOptions& opt, const BacktestOptions& b) {
  if (b.kurtosis != "raw" && b.kurtosis != "excess") usage("--kurtosis must be raw or excess");
  if (b.days == 0) usage("--days must be positive");
  if (b.cost < 0.0) usage("--cost must be non-negative");
  if (!(b.target_divisor > 0.0)) usage("--target-divisor must be positive");
  const auto kurt = b.kurtosis == "raw" ? mktlab::KurtosisConvention::raw
                                        : mktlab::KurtosisConvention::excess;
  const auto ctx = load_context(opt);

  mktlab::ForecasterConfig net;
  net.input_days = b.input_days;
  net.hidden_units = b.hidden;
  net.batch_size = b.batch;
  net.epochs = b.epochs;
  net.adam.learning_rate = b.learning_rate;
  net.target_divisor = b.target_divisor;
  net.warm_start = !b.cold_start;
  auto net_short = net;
  auto net_long = net;
  net_short.seed = opt.seed;
  net_long.seed = opt.seed + 0x9e3779b97f4a7c15ULL;

  mktlab::StrategyConfig cfg;
  cfg.threshold_points = b.threshold;
  cfg.long_only = !b.allow_short;
  cfg.agreement_required = !b.mean_rule;
  cfg.cost_per_change = b.cost;
  cfg.n_l = b.n_l;
  cfg.n_g = b.n_g;

  const auto f_short =
      mktlab::rolling_feature(ctx.panel, b.short_window, true, ctx.target, opt.workers);
  const auto f_long = mktlab::rolling_feature(ctx.panel, b.long_window, true, ctx.target, opt.workers);
  const auto run =
      mktlab::walk_forward(ctx.panel, ctx.target, f_short, f_long, b.days, net_short, net_long);

  const auto main_run =
      mktlab::run_strategy(run.forecasts, run.market_returns, run.close_dates, cfg, kurt);
  auto plain_cfg = cfg;
  plain_cfg.n_l = 0;
  plain_cfg.n_g = 0;
  const auto plain =
      mktlab::run_strategy(run.forecasts, run.market_returns, run.close_dates, plain_cfg, kurt);
  const auto grid = mktlab::regularizer_grid(run, cfg, kurt);

  Outputs out(opt.out);
  out.text("ledger.csv", ledger_csv(main_run));

  const auto closes = ctx.panel.column(ctx.target);
  const double first_close = closes[run.decision_rows.front()];
  std::string equity = "date,capital,buy_and_hold\n";
  std::vector<double> day, hold;
  for (std::size_t i = 0; i < main_run.equity.dates.size(); ++i) {
    const double bh = closes[run.decision_rows.front() + i] / first_close;
    equity += fmt::format("{},{},{}\n", main_run.equity.dates[i].iso(),
                          num(main_run.equity.capital[i]), num(bh));
    day.push_back(static_cast<double>(i));
    hold.push_back(bh);
  }
  out.text("equity.csv", equity);

  out.json_file("stats.json", {{"target", ctx.manifest.target},
                               {"first_decision", run.forecasts.front().date.iso()},
                               {"last_decision", run.forecasts.back().date.iso()},
                               {"config", config_json(cfg)},
                               {"stats", stats_json(main_run.stats)},
                               {"buy_and_hold_total_return", run.buy_and_hold_return}});

  json grid_json;
  grid_json["kurtosis_convention"] = mktlab::to_string(kurt);
  grid_json["buy_and_hold_total_return"] = run.buy_and_hold_return;
  grid_json["unregularized"] = stats_json(plain.stats);
  grid_json["configurations"] = json::array();
  mktlab::SvgPlot grid_plot("Capital with loss regularization", "day", "capital");
  grid_plot.add_series("no regularizer", day, plain.equity.capital);
  for (const auto& e : grid) {
    json entry = {{"n_l", e.n_l}, {"n_g", e.n_g}};
    entry.update(stats_json(e.result.stats));
    grid_json["configurations"].push_back(entry);
    grid_plot.add_series(fmt::format("N_l={} N_g={}", e.n_l, e.n_g), day, e.result.equity.capital);
  }
  out.json_file("grid.json", grid_json);
  out.text("grid.md", grid_markdown(grid_json));

  mktlab::SvgPlot eq_plot("Capital", "day", "capital");
  eq_plot.add_series("strategy", day, main_run.equity.capital);
  eq_plot.add_series("buy and hold", day, hold);
  out.svg("equity.svg", eq_plot);
  out.svg("grid.svg", grid_plot);

  out.manifest("backtest", opt,
               {{"days", b.days},
                {"strategy", config_json(cfg)},
                {"kurtosis", b.kurtosis},
                {"windows", {b.short_window, b.long_window}},
                {"network",
                 {{"input_days", b.input_days},
                  {"hidden", b.hidden},
                  {"batch", b.batch},
                  {"epochs", b.epochs},
                  {"learning_rate", b.learning_rate},
                  {"target_divisor", b.target_divisor},
                  {"warm_start", !b.cold_start},
                  {"seeds", {net_short.seed, net_long.seed}}}}});
  return kOk;
}

// ---------------------------------------------------------------- report

std::optional<json> read_json(const fs::path& path) {
  if (!fs::is_regular_file(path)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, fmt::format("{}: {}", path.string(), e.what()));
  }
}

int cmd_report(const std::string& dir) {
  if (!fs::is_directory(dir)) usage(fmt::format("'{}' is not a directory", dir));
  std::string md = "# Run report\n\n";
  bool any = false;
  if (auto run = read_json(fs::path(dir) / "run.json")) {
    md += fmt::format("command `{}`, seed {}, version {}\n\n", (*run)["command"].get<std::string>(),
                      (*run)["seed"].get<std::uint64_t>(), (*run)["version"].get<std::string>());
  }
  if (auto d = read_json(fs::path(dir) / "dcca_summary.json")) {
    any = true;
    md += "## Detrended correlations\n\n| pair | lambda | r^2 | fit range | excluded |\n|---|---|---|---|---|\n";
    for (const auto& e : (*d)["pairs"]) {
      const auto pair = fmt::format("{} x {}", e["pair"][0].get<std::string>(),
                                    e["pair"][1].get<std::string>());
      const auto range = fmt::format("{}..{}", e["fit_range"][0].get<std::size_t>(),
                                     e["fit_range"][1].get<std::size_t>());
      if (e["power_law"].get<bool>()) {
        md += fmt::format("| {} | {:.3f} | {:.4f} | {} | {} |\n", pair, e["lambda"].get<double>(),
                          e["r_squared"].get<double>(), range, e["excluded_points"].get<std::size_t>());
      } else {
        md += fmt::format("| {} | no power law | | {} | |\n", pair, range);
      }
    }
    md += "\n";
  }
  if (auto l = read_json(fs::path(dir) / "levy.json")) {
    any = true;
    md += fmt::format(
        "## Return to origin\n\n| series | alpha | stderr | slope | realizations | bin width |\n"
        "|---|---|---|---|---|---|\n| {} | {:.3f} | {:.3f} | {:.4f} | {} | {:.3g} |\n\n",
        (*l)["series"].get<std::string>(), (*l)["alpha"].get<double>(), (*l)["stderr"].get<double>(),
        (*l)["slope"].get<double>(), (*l)["realizations"].get<std::size_t>(),
        (*l)["bin_width"].get<double>());
  }
  std::vector<fs::path> loadings;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("loadings_w") && name.ends_with(".json")) loadings.push_back(entry.path());
  }
  std::sort(loadings.begin(), loadings.end());
  for (const auto& path : loadings) {
    any = true;
    const auto j = *read_json(path);
    for (const auto& w : j["windows"]) {
      md += fmt::format("## First component, window {} ending {}\n\n| series | loading |\n|---|---|\n",
                        j["window"].get<std::size_t>(), w["date"].get<std::string>());
      for (const auto& r : w["first_component"]) {
        md += fmt::format("| {} | {:.3f} |\n", r["series"].get<std::string>(),
                          r["loading"].get<double>());
      }
      md += "\neigenvalues:";
      for (const auto& v : w["eigenvalues"]) md += fmt::format(" {:.4g}", v.get<double>());
      md += "\n\n";
    }
  }
  if (auto s = read_json(fs::path(dir) / "stats.json")) {
    any = true;
    const auto& st = (*s)["stats"];
    md += fmt::format("## Backtest {} .. {}\n\ntotal {}, monthly {}, buy and hold {}\n\n",
                      (*s)["first_decision"].get<std::string>(),
                      (*s)["last_decision"].get<std::string>(), pct(st["total_return"].get<double>()),
                      pct(st["monthly_return"].get<double>()),
                      pct((*s)["buy_and_hold_total_return"].get<double>()));
  }
  if (auto g = read_json(fs::path(dir) / "grid.json")) {
    any = true;
    md += "## Loss regularization grid\n\n" + grid_markdown(*g) + "\n";
  }
  if (!any) throw Error(ErrorKind::insufficient_data, fmt::format("no result files in '{}'", dir));
  write_text(fs::path(dir) / "report.md", md);
  return kOk;
}

int exit_code(const Error& e) {
  switch (e.category()) {
    case mktlab::ErrorCategory::usage: return kUsage;
    case mktlab::ErrorCategory::data: return kData;
    case mktlab::ErrorCategory::numeric: return kNumeric;
  }
  return kInternal;
}

void add_common(CLI::App& sub, CommonOptions& opt) {
  sub.add_option("--manifest", opt.manifest, "panel manifest file");
  sub.add_option("--from", opt.from, "first date, YYYY-MM-DD");
  sub.add_option("--to", opt.to, "last date, YYYY-MM-DD");
  sub.add_option("--seed", opt.seed, "master seed")->capture_default_str();
  sub.add_option("--out", opt.out, "output directory")->capture_default_str();
  sub.add_option("--workers", opt.workers, "worker threads")->capture_default_str()
      ->check(CLI::Range(1u, 1024u));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Market inefficiency analysis toolkit", "mktool"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MKTOOL_VERSION);

  CommonOptions common;
  CorrOptions corr;
  DccaOptions dcca;
  LevyOptions levy;
  PcaOptions pca;
  BacktestOptions bt;
  std::string report_dir;

  auto* c = app.add_subcommand("corr", "lagged correlations of the target with every series");
  add_common(*c, common);
  c->add_option("--lags", corr.lags, "largest lag")->capture_default_str();
  c->add_flag("--abs", corr.absolute, "correlate absolute reduced returns");
  c->add_option("--confidence", corr.confidence, "noise band level")->capture_default_str();

  auto* d = app.add_subcommand("dcca", "detrended fluctuation and cross-correlation");
  add_common(*d, common);
  d->add_option("--box-min", dcca.box_min)->capture_default_str();
  d->add_option("--box-max", dcca.box_max, "0: a quarter of the series")->capture_default_str();
  d->add_option("--box-ratio", dcca.box_ratio)->capture_default_str();
  d->add_option("--fit-min", dcca.fit_min, "0: smallest box")->capture_default_str();
  d->add_option("--fit-max", dcca.fit_max, "0: largest box")->capture_default_str();

  auto* l = app.add_subcommand("levy", "tail index from the return to origin");
  add_common(*l, common);
  l->add_option("--series", levy.series, "series id (default: target)");
  l->add_option("--realizations", levy.realizations)->capture_default_str();
  l->add_option("--n-values", levy.n_values, "block lengths")->delimiter(',')->capture_default_str();
  l->add_option("--fit-min", levy.fit_min)->capture_default_str();
  l->add_option("--fit-max", levy.fit_max)->capture_default_str();
  l->add_option("--bin-width", levy.bin_width, "0: 0.1 sigma")->capture_default_str();

  auto* p = app.add_subcommand("pca", "rolling first principal component features");
  add_common(*p, common);
  p->add_option("--windows", pca.windows)->delimiter(',')->capture_default_str();
  p->add_flag("--raw", pca.raw, "skip the 3-day trailing average");
  p->add_option("--loadings-date", pca.loadings_dates, "dates to dump loadings for");

  auto* b = app.add_subcommand("backtest", "walk-forward forecasts and the threshold strategy");
  add_common(*b, common);
  b->add_option("--days", bt.days)->capture_default_str();
  b->add_option("--threshold", bt.threshold, "index points")->capture_default_str();
  b->add_flag("--allow-short", bt.allow_short);
  b->add_flag("--mean-rule", bt.mean_rule, "compare the mean forecast instead of both");
  b->add_option("--n-l", bt.n_l)->capture_default_str();
  b->add_option("--n-g", bt.n_g)->capture_default_str();
  b->add_option("--cost", bt.cost, "fraction per position change")->capture_default_str();
  b->add_option("--kurtosis", bt.kurtosis, "raw or excess")->capture_default_str();
  b->add_option("--short-window", bt.short_window)->capture_default_str();
  b->add_option("--long-window", bt.long_window)->capture_default_str();
  b->add_option("--input-days", bt.input_days)->capture_default_str();
  b->add_option("--hidden", bt.hidden)->capture_default_str();
  b->add_option("--batch", bt.batch)->capture_default_str();
  b->add_option("--epochs", bt.epochs)->capture_default_str();
  b->add_option("--learning-rate", bt.learning_rate)->capture_default_str();
  b->add_option("--target-divisor", bt.target_divisor)->capture_default_str();
  b->add_flag("--cold-start", bt.cold_start, "reinitialize the networks every day");

  auto* r = app.add_subcommand("report", "markdown tables from the JSON in a result directory");
  r->add_option("--out", report_dir, "result directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c->parsed()) return cmd_corr(common, corr);
    if (d->parsed()) return cmd_dcca(common, dcca);
    if (l->parsed()) return cmd_levy(common, levy);
    if (p->parsed()) return cmd_pca(common, pca);
    if (b->parsed()) return cmd_backtest(common, bt);
    if (r->parsed()) return cmd_report(report_dir);
  } catch (const Error& e) {
    err << "mktool: " << e.what() << "\n";
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    err << "mktool: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "mktool: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace mktool
