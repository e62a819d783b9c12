#include <doctest.h>

#include <cmath>

#include "mktlab/correlation.hpp"
#include "mktlab/error.hpp"
#include "mktlab/synthetic.hpp"

using namespace mktlab;

TEST_SUITE("correlation") {

TEST_CASE("lag zero autocorrelation is one") {
  const auto a = reduce("A", synthetic::gaussian(1000, 3));
  const auto c = cross_correlation(a, a, 10);
  CHECK(c.lags.size() == 11);
  CHECK(c.values.size() == 11);
  CHECK(std::abs(c.values[0] - 1.0) < 1e-12);
  const auto ca = cross_correlation(a, a, 10, true);
  CHECK(std::abs(ca.values[0] - 1.0) < 1e-12);
  CHECK(ca.absolute);
}

TEST_CASE("shifted copy peaks at its shift") {
  const auto raw = synthetic::gaussian(2003, 4);
  const std::vector<double> early(raw.begin() + 3, raw.end());
  const std::vector<double> late(raw.begin(), raw.end() - 3);
  // late(i + 3) == early(i): a leads b by three days
  const auto c = cross_correlation(reduce("A", early), reduce("B", late), 5);
  CHECK(c.values[3] > 0.99);
  CHECK(std::abs(c.values[2]) < 0.1);
}

TEST_CASE("naive oracle") {
  const auto a = reduce("A", synthetic::gaussian(300, 5));
  const auto b = reduce("B", synthetic::uniform(300, 6));
  const auto c = cross_correlation(a, b, 7);
  for (std::size_t n = 0; n <= 7; ++n) {
    double s = 0.0;
    for (std::size_t i = 0; i + n < 300; ++i) s += a.values[i] * b.values[i + n];
    CHECK(c.values[n] == doctest::Approx(s / static_cast<double>(300 - n)).epsilon(1e-12));
  }
}

TEST_CASE("absolute variant of a random walk sits at the noise level") {
  const std::size_t n = 20000;
  const auto a = reduce("U", synthetic::uniform(n, 7));
  const auto c = cross_correlation(a, a, 100, true);
  const double band = 2.0 / std::sqrt(static_cast<double>(n));
  std::size_t outside = 0;
  for (std::size_t lag = 1; lag <= 100; ++lag) {
    outside += std::abs(c.values[lag]) > band;
    CHECK(std::abs(c.values[lag]) < 2.0 * band);
  }
  // a 2/sqrt(N) band holds about 95% of lags; 12 or more of 100 has probability < 1e-3
  CHECK(outside < 12);
}

TEST_CASE("AR(1) autocorrelation decays as rho^n") {
  const std::size_t n = 100000;
  const auto a = reduce("AR", synthetic::ar1(n, 0.5, 8));
  const auto c = cross_correlation(a, a, 5);
  const double band = noise_band(n, 0.999);
  for (int lag = 1; lag <= 5; ++lag) {
    CAPTURE(lag);
    CHECK(std::abs(c.values[static_cast<std::size_t>(lag)] - std::pow(0.5, lag)) < band);
  }
}

TEST_CASE("properties: bounded and symmetric at lag zero") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto a = reduce("A", synthetic::gaussian(400, seed));
    const auto b = reduce("B", synthetic::ar1(400, 0.7, seed + 100));
    for (bool absolute : {false, true}) {
      const auto ab = cross_correlation(a, b, 40, absolute);
      const auto ba = cross_correlation(b, a, 40, absolute);
      CHECK(std::abs(ab.values[0] - ba.values[0]) < 1e-12);
      for (double v : ab.values) CHECK(std::abs(v) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("errors") {
  const auto a = reduce("A", synthetic::gaussian(50, 1));
  const auto b = reduce("B", synthetic::gaussian(40, 2));
  CHECK_THROWS_AS((void)cross_correlation(a, b, 5), Error);
  try {
    (void)cross_correlation(a, a, 50);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::range);
  }
}

TEST_CASE("noise band") {
  CHECK(noise_band(10000) == doctest::Approx(0.0196).epsilon(1e-3));
  CHECK(noise_band(4) == doctest::Approx(0.98).epsilon(1e-3));
  CHECK_THROWS_AS((void)noise_band(1), Error);
}

}  // TEST_SUITE
