#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mktlab/error.hpp"
#include "mktlab/levy.hpp"
#include "mktlab/stats.hpp"
#include "mktlab/synthetic.hpp"

using namespace mktlab;

namespace {

ReturnToOriginCurve exact_curve(double slope) {
  ReturnToOriginCurve c;
  for (std::size_t n = 1; n <= 256; n *= 2) {
    c.n_values.push_back(n);
    c.p_zero.push_back(std::pow(static_cast<double>(n), slope));
    c.std_error.push_back(0.0);
  }
  c.realizations = 1;
  c.bin_width = 1.0;
  return c;
}

const std::vector<std::size_t> kPowers{1, 2, 4, 8, 16, 32, 64, 128, 256};

}  // namespace

TEST_SUITE("levy") {

TEST_CASE("uniform density at the origin") {
  // n = 1 sees the data itself, so every realization agrees; the sampling
  // error is binomial in the bin count
  const auto x = synthetic::uniform(50000, 61);
  const std::vector<std::size_t> n{1};
  const double bin = 0.05;
  const auto c = return_to_origin(x, n, 20, bin, 7);
  const double p = 0.5 * bin;
  const double se = std::sqrt(p * (1.0 - p) / 50000.0) / bin;
  CHECK(std::abs(c.p_zero[0] - 0.5) < 3.0 * se);
  CHECK(c.std_error[0] == 0.0);
}

TEST_CASE("Gaussian sums return to origin as n^-1/2") {
  const auto x = synthetic::gaussian(20000, 62);
  const auto c = return_to_origin(x, kPowers, 200, default_bin_width(x), 3);
  const auto est = estimate_alpha(c, 1, 256);
  CHECK(est.slope == doctest::Approx(-0.5).epsilon(0.06));
  CHECK(est.alpha == doctest::Approx(2.0).epsilon(0.075));
}

TEST_CASE("all-zero returns hit every time") {
  const std::vector<double> zeros(1000, 0.0);
  const auto c = return_to_origin(zeros, kPowers, 3, 0.25, 1);
  for (std::size_t i = 0; i < c.n_values.size(); ++i) {
    CHECK(c.p_zero[i] == 4.0);
    CHECK(c.std_error[i] == 0.0);
  }
}

TEST_CASE("exact curves") {
  auto e = estimate_alpha(exact_curve(-0.5), 1, 256);
  CHECK(e.alpha == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(e.alpha + 1.0 / e.slope) < 1e-12);
  CHECK(e.r_squared == doctest::Approx(1.0));

  e = estimate_alpha(exact_curve(-1.0 / 0.54), 1, 256);
  CHECK(e.alpha == doctest::Approx(0.54).epsilon(1e-12));

  // smaller alpha, steeper slope
  double previous = 0.0;
  for (double alpha : {2.0, 1.5, 1.0, 0.54}) {
    const auto fit = estimate_alpha(exact_curve(-1.0 / alpha), 1, 256);
    CHECK(fit.slope < previous);
    previous = fit.slope;
  }
}

TEST_CASE("estimate errors") {
  auto c = exact_curve(-0.5);
  CHECK_THROWS_AS((void)estimate_alpha(c, 1, 2), Error);
  std::fill(c.p_zero.begin() + 2, c.p_zero.end(), 0.0);
  try {
    (void)estimate_alpha(c, 1, 256);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::fit);
  }
  auto rising = exact_curve(0.5);
  CHECK_THROWS_AS((void)estimate_alpha(rising, 1, 256), Error);
}

TEST_CASE("return_to_origin preconditions") {
  const auto x = synthetic::gaussian(100, 1);
  const std::vector<std::size_t> too_long{101};
  const std::vector<std::size_t> ok{1, 2};
  auto kind = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::numeric;
  };
  CHECK(kind([&] { (void)return_to_origin(x, too_long, 1, 0.1, 1); }) == ErrorKind::range);
  CHECK(kind([&] { (void)return_to_origin(x, ok, 0, 0.1, 1); }) == ErrorKind::invalid_argument);
  CHECK(kind([&] { (void)return_to_origin(x, ok, 1, 0.0, 1); }) == ErrorKind::invalid_argument);
}

TEST_CASE("shuffle keeps the multiset") {
  const auto x = synthetic::gaussian(5000, 63);
  const auto y = shuffled(x, 5, 9);
  CHECK(y != x);
  auto sx = x, sy = y;
  std::sort(sx.begin(), sx.end());
  std::sort(sy.begin(), sy.end());
  CHECK(sx == sy);
  double s1 = 0, s2 = 0, q1 = 0, q2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s1 += x[i];
    s2 += y[i];
    q1 += x[i] * x[i];
    q2 += y[i] * y[i];
  }
  CHECK(std::abs(s1 - s2) < 1e-9);
  CHECK(std::abs(q1 - q2) < 1e-9);
  CHECK(shuffled(x, 5, 9) == y);
  CHECK(shuffled(x, 5, 10) != y);
}

TEST_CASE("estimator is exchangeable and worker independent") {
  const auto x = synthetic::ar1(8000, 0.0, 64);
  const std::vector<std::size_t> n{2, 4, 16};
  const double bin = default_bin_width(x);
  const auto a = return_to_origin(x, n, 100, bin, 1, 1);
  const auto b = return_to_origin(shuffled(x, 99, 0), n, 100, bin, 2, 1);
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double se = std::hypot(a.std_error[i], b.std_error[i]);
    CHECK(std::abs(a.p_zero[i] - b.p_zero[i]) <= 3.0 * se + 1e-12);
  }
  const auto c = return_to_origin(x, n, 100, bin, 1, 3);
  CHECK(a.p_zero == c.p_zero);
  CHECK(a.std_error == c.std_error);
}

TEST_CASE("quadrature matches closed forms") {
  // alpha = 1 is the Cauchy law, alpha = 2 a Gaussian of variance 2 gamma
  const TruncatedLevy cauchy(1.0, 0.7, 10.0);
  const TruncatedLevy gauss(2.0, 1.3, 10.0);
  for (double x : {0.0, 0.3, 1.0, 2.5, 6.0}) {
    CAPTURE(x);
    const double c = 0.7 / (std::numbers::pi * (0.49 + x * x));
    CHECK(cauchy.levy_density(x) == doctest::Approx(c).epsilon(1e-6));
    const double g = std::exp(-x * x / (4 * 1.3)) / (2.0 * std::sqrt(std::numbers::pi * 1.3));
    CHECK(gauss.levy_density(x) == doctest::Approx(g).epsilon(1e-6).scale(1e-12));
  }
}

TEST_CASE("truncated density is normalized and symmetric") {
  const TruncatedLevy law(1.5, 1.0, 20.0);
  const auto x = law.grid();
  const auto p = law.density();
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) area += 0.5 * (p[i] + p[i - 1]) * (x[i] - x[i - 1]);
  CHECK(area == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(law.cdf().back() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(p[i] == p[x.size() - 1 - i]);
  CHECK(law.params().c > 1.0);
  CHECK(law(25.0) == 0.0);
  CHECK(law(0.0) == doctest::Approx(p[x.size() / 2]));
}

TEST_CASE("sampler") {
  SUBCASE("alpha 2 variance") {
    const auto s = sample_truncated_levy(make_levy_params(2.0, 1.0, 12.0), 200000, 5);
    CHECK(stats::variance(s) == doctest::Approx(2.0).epsilon(0.02));
  }
  SUBCASE("symmetric and truncated") {
    for (double alpha : {0.8, 1.2, 1.5, 1.9}) {
      CAPTURE(alpha);
      const auto params = make_levy_params(alpha, 1.0, 8.0);
      const auto s = sample_truncated_levy(params, 50000, 6);
      const double se = stats::stddev(s) / std::sqrt(static_cast<double>(s.size()));
      CHECK(std::abs(stats::mean(s)) < 3.0 * se);
      const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
      CHECK(*lo >= -8.0);
      CHECK(*hi <= 8.0);
    }
  }
  SUBCASE("seeded") {
    const auto params = make_levy_params(1.5, 1.0, 20.0);
    CHECK(sample_truncated_levy(params, 100, 1) == sample_truncated_levy(params, 100, 1));
    CHECK(sample_truncated_levy(params, 100, 1) != sample_truncated_levy(params, 100, 2));
  }
  SUBCASE("parameter checks") {
    CHECK_THROWS_AS(TruncatedLevy(0.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(TruncatedLevy(2.5, 1.0, 1.0), Error);
    CHECK_THROWS_AS(TruncatedLevy(1.5, 0.0, 1.0), Error);
    CHECK_THROWS_AS(TruncatedLevy(1.5, 1.0, -1.0), Error);
    auto bad = make_levy_params(1.5, 1.0, 20.0);
    bad.c *= 1.01;
    CHECK_THROWS_AS((void)sample_truncated_levy(bad, 10, 1), Error);
  }
  SUBCASE("unresolvable oscillation is a numeric error") {
    try {
      (void)TruncatedLevy(0.3, 1e-3, 1e6);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::numeric);
    }
  }
}

TEST_CASE("Levy round trip at small n") {
  const auto s = sample_truncated_levy(make_levy_params(1.5, 1.0, 20.0), 50000, 8);
  const std::vector<std::size_t> n{1, 2, 4, 8, 16};
  const auto c = return_to_origin(s, n, 100, default_bin_width(s), 4);
  const auto est = estimate_alpha(c, 1, 16);
  CHECK(est.alpha == doctest::Approx(1.5).epsilon(0.1));
}

}  // TEST_SUITE
