#include "mktlab/synthetic.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "mktlab/error.hpp"
#include "mktlab/pca.hpp"
#include "mktlab/random.hpp"
#include "mktlab/stats.hpp"

namespace mktlab::synthetic {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sigma) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  std::vector<double> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

std::vector<double> uniform(std::size_t n, std::uint64_t seed, double lo, double hi) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

std::vector<double> ar1(std::size_t n, double rho, std::uint64_t seed) {
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::invalid_argument, "AR(1) needs |rho| < 1");
  const auto e = gaussian(n, seed);
  std::vector<double> out(n);
  if (n == 0) return out;
  out[0] = e[0] / std::sqrt(1.0 - rho * rho);
  for (std::size_t t = 1; t < n; ++t) out[t] = rho * out[t - 1] + e[t];
  return out;
}

std::vector<double> fractional_noise(std::size_t n, double d, std::uint64_t seed,
                                     std::size_t memory) {
  if (!(d > -0.5 && d < 0.5)) throw Error(ErrorKind::invalid_argument, "need -0.5 < d < 0.5");
  std::vector<double> psi(memory + 1);
  psi[0] = 1.0;
  for (std::size_t k = 1; k <= memory; ++k) {
    psi[k] = psi[k - 1] * (static_cast<double>(k) - 1.0 + d) / static_cast<double>(k);
  }
  const auto e = gaussian(n + memory, seed);
  std::vector<double> out(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (std::size_t k = 0; k <= memory; ++k) acc += psi[k] * e[t + memory - k];
    out[t] = acc;
  }
  return out;
}

std::vector<Date> business_days(Date first, std::size_t count) {
  std::vector<Date> out;
  out.reserve(count);
  Date d = first;
  while (out.size() < count) {
    const std::chrono::weekday wd{d.days()};
    if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.push_back(d);
    d = d.plus_days(1);
  }
  return out;
}

std::vector<double> prices_from_log_returns(std::span<const double> log_returns, double start) {
  std::vector<double> out;
  out.reserve(log_returns.size() + 1);
  double level = std::log(start);
  out.push_back(start);
  for (double r : log_returns) {
    level += r;
    out.push_back(std::exp(level));
  }
  return out;
}

namespace {

std::vector<std::string> column_ids(std::size_t k) {
  std::vector<std::string> ids{"TARGET"};
  for (std::size_t i = 1; i < k; ++i) ids.push_back(fmt::format("S{}", i));
  return ids;
}

// Other columns: random walks on their own scale, loosely tied to the
// target's move so the first component is not pure noise.
double companion_step(std::normal_distribution<double>& unit, std::mt19937_64& rng,
                      double target_move_z, std::size_t column) {
  const double coupling = column % 2 == 1 ? 0.6 : -0.4;
  return 10.0 * (coupling * target_move_z + std::sqrt(1.0 - coupling * coupling) * unit(rng));
}

}  // namespace

AlignedPanel random_walk_panel(const MarketShape& shape, std::uint64_t seed) {
  if (shape.series == 0 || shape.rows < 2) throw Error(ErrorKind::invalid_argument, "empty shape");
  auto rng = make_rng(seed, 1);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> cols(shape.series);
  cols[0].push_back(shape.target_start);
  for (std::size_t k = 1; k < shape.series; ++k) cols[k].push_back(1000.0);
  for (std::size_t t = 1; t < shape.rows; ++t) {
    const double z = unit(rng);
    cols[0].push_back(std::max(cols[0].back() + shape.target_step * z, 1.0));
    for (std::size_t k = 1; k < shape.series; ++k) {
      cols[k].push_back(std::max(cols[k].back() + companion_step(unit, rng, z, k), 1.0));
    }
  }
  return AlignedPanel(business_days(shape.first_date, shape.rows), column_ids(shape.series),
                      std::move(cols), FillPolicy::intersection);
}

namespace {

constexpr std::size_t kWindow = 5;
constexpr std::size_t kSmooth = 3;
constexpr std::size_t kInputs = 5;

double signal_of(std::span<const double> f) {
  // f holds the five latest smoothed components, oldest first.
  const double drive = 0.9 * f[4] + 0.5 * f[3] - 0.3 * f[1];
  return std::tanh(drive);
}

struct Generated {
  std::vector<std::vector<double>> cols;
  std::vector<double> signals;
};

Generated generate(const MarketShape& shape, std::uint64_t seed, double noise_points) {
  auto rng = make_rng(seed, 2);
  std::normal_distribution<double> unit(0.0, 1.0);
  const auto ids = column_ids(shape.series);
  Generated g;
  g.cols.assign(shape.series, {});
  g.cols[0].push_back(shape.target_start);
  for (std::size_t k = 1; k < shape.series; ++k) g.cols[k].push_back(1000.0);

  std::vector<double> raw;       // raw projections
  std::vector<double> smoothed;  // trailing 3-day means
  double next_change = shape.target_step * unit(rng);
  for (std::size_t t = 1; t < shape.rows; ++t) {
    const double change = next_change;
    const double z = change / shape.target_step;
    g.cols[0].push_back(std::max(g.cols[0].back() + change, 1.0));
    for (std::size_t k = 1; k < shape.series; ++k) {
      g.cols[k].push_back(std::max(g.cols[k].back() + companion_step(unit, rng, z, k), 1.0));
    }

    // Feature of the window that ends today (t differences exist).
    if (t >= kWindow) {
      PanelDifferences diffs;
      diffs.ids = ids;
      diffs.values.resize(static_cast<Eigen::Index>(kWindow), static_cast<Eigen::Index>(shape.series));
      for (std::size_t r = 0; r < kWindow; ++r) {
        const std::size_t row = t - kWindow + 1 + r;
        for (std::size_t k = 0; k < shape.series; ++k) {
          diffs.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
              g.cols[k][row] - g.cols[k][row - 1];
        }
        diffs.dates.push_back(Date{});
      }
      raw.push_back(analyze_window(diffs, kWindow - 1, kWindow, 0).projection);
      if (raw.size() >= kSmooth) {
        double s = 0.0;
        for (std::size_t i = raw.size() - kSmooth; i < raw.size(); ++i) s += raw[i];
        smoothed.push_back(s / static_cast<double>(kSmooth));
      }
    }

    const double noise = unit(rng);
    if (smoothed.size() >= kInputs) {
      const double sig =
          signal_of(std::span<const double>(smoothed).last(kInputs)) * shape.target_step;
      g.signals.push_back(sig);
      next_change = sig + noise_points * noise;
    } else {
      next_change = shape.target_step * noise;
    }
  }
  return g;
}

}  // namespace

AlignedPanel learnable_panel(const MarketShape& shape, std::uint64_t seed, double noise_ratio) {
  if (shape.series == 0 || shape.rows < 2 * (kWindow + kSmooth + kInputs)) {
    throw Error(ErrorKind::invalid_argument, "learnable panel needs more rows");
  }
  // First pass measures the signal's spread; the second pass fixes the noise
  // at noise_ratio times that spread with the same random streams.
  const auto pilot = generate(shape, seed, noise_ratio * shape.target_step);
  const double spread = stats::stddev(pilot.signals);
  auto g = generate(shape, seed, noise_ratio * spread);
  return AlignedPanel(business_days(shape.first_date, shape.rows), column_ids(shape.series),
                      std::move(g.cols), FillPolicy::intersection);
}

}  // namespace mktlab::synthetic
