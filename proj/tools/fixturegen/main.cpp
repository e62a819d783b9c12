// Writes the synthetic fixtures bundled under data/fixtures. Output is a pure
// function of the seeds below, so regenerating leaves the files unchanged.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mktlab/levy.hpp"
#include "mktlab/synthetic.hpp"

namespace fs = std::filesystem;
namespace syn = mktlab::synthetic;

namespace {

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

void write_series(const fs::path& path, const std::vector<mktlab::Date>& dates,
                  std::span<const double> closes) {
  std::string csv = "date,close\n";
  for (std::size_t i = 0; i < dates.size(); ++i) {
    csv += fmt::format("{},{}\n", dates[i].iso(), closes[i]);
  }
  write_file(path, csv);
}

void write_returns(const fs::path& path, std::span<const double> log_returns, double start) {
  const auto closes = syn::prices_from_log_returns(log_returns, start);
  write_series(path, syn::business_days(mktlab::Date{2000, 1, 3}, closes.size()), closes);
}

void write_panel(const fs::path& dir, const std::string& stem, const mktlab::AlignedPanel& panel) {
  std::string manifest = "target = " + panel.ids().front() + "\n";
  for (std::size_t k = 0; k < panel.cols(); ++k) {
    const auto file = fmt::format("{}_{}.csv", stem, panel.ids()[k]);
    std::vector<mktlab::Date> dates(panel.dates().begin(), panel.dates().end());
    write_series(dir / file, dates, panel.column(k));
    manifest += fmt::format("series.{} = {}\n", panel.ids()[k], file);
  }
  write_file(dir / (stem + ".manifest"), manifest);
}

std::vector<double> scaled(std::vector<double> v, double factor) {
  for (double& x : v) x *= factor;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: fixturegen <output-dir>\n";
    return 2;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);

  constexpr std::size_t kLong = 20000;
  write_returns(dir / "gaussian.csv", syn::gaussian(kLong, 11, 0.01), 100.0);
  write_file(dir / "gaussian.manifest", "target = GAUSS\nseries.GAUSS = gaussian.csv\n");

  const auto levy = mktlab::sample_truncated_levy(mktlab::make_levy_params(1.5, 1.0, 20.0), kLong, 12);
  write_returns(dir / "levy.csv", scaled(levy, 0.005), 100.0);
  write_file(dir / "levy.manifest", "target = LEVY\nseries.LEVY = levy.csv\n");

  write_returns(dir / "ar1.csv", scaled(syn::ar1(5000, 0.5, 13), 0.01), 100.0);
  write_file(dir / "ar1.manifest", "target = AR1\nseries.AR1 = ar1.csv\n");
  write_file(dir / "pair.manifest",
             "# AR(1) target against white noise over the shared dates\n"
             "target = AR1\nseries.AR1 = ar1.csv\nseries.GAUSS = gaussian.csv\n");

  {
    // common long-memory component plus independent noise in both series
    const std::size_t n = 8000;
    const auto shared = syn::fractional_noise(n, 0.4, 14);
    auto a = syn::gaussian(n, 15, 0.5);
    auto b = syn::gaussian(n, 16, 0.5);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = 0.01 * (a[i] + shared[i]);
      b[i] = 0.01 * (b[i] + shared[i]);
    }
    write_returns(dir / "trend_a.csv", a, 100.0);
    write_returns(dir / "trend_b.csv", b, 50.0);
    write_file(dir / "trend.manifest",
               "target = A\nseries.A = trend_a.csv\nseries.B = trend_b.csv\n");
  }

  write_series(dir / "constant.csv", syn::business_days(mktlab::Date{2000, 1, 3}, 300),
               std::vector<double>(300, 100.0));
  write_file(dir / "constant.manifest", "target = FLAT\nseries.FLAT = constant.csv\n");

  syn::MarketShape shape;
  write_panel(dir, "learnable", syn::learnable_panel(shape, 1));
  write_panel(dir, "random_walk", syn::random_walk_panel(shape, 1));
  return 0;
}
