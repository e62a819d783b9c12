#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "mktlab/error.hpp"
#include "mktlab/ingest.hpp"
#include "mktlab/manifest.hpp"
#include "mktlab/stats.hpp"
#include "mktlab/synthetic.hpp"
#include "support.hpp"

using namespace mktlab;

namespace {

PriceSeries make(std::string id, std::vector<Date> dates, std::vector<double> closes) {
  return PriceSeries(std::move(id), std::move(dates), std::move(closes));
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an mktlab::Error");
  return ErrorKind::numeric;
}

const Date d1{2016, 1, 4};
const Date d2{2016, 1, 5};
const Date d3{2016, 1, 6};

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("dates parse strictly") {
  CHECK(parse_date("2016-01-04") == d1);
  CHECK(parse_date("04/01/2016", "%d/%m/%Y") == d1);
  CHECK_FALSE(parse_date("2016-02-30"));
  CHECK_FALSE(parse_date("2016-1-4x"));
  CHECK_FALSE(parse_date(""));
  CHECK(d1.iso() == "2016-01-04");
}

TEST_CASE("csv rows are read and sorted") {
  const CsvSchema schema;
  auto s = parse_csv("date,close\n2016-01-04,100.0\n2016-01-05,101.0\n", schema, "X");
  CHECK(s.size() == 2);
  CHECK(s.closes()[1] == 101.0);

  auto shuffled = parse_csv("date,close\n2016-01-06,3\n2016-01-04,1\n2016-01-05,2\n", schema, "X");
  REQUIRE(shuffled.size() == 3);
  CHECK(shuffled.dates()[0] == d1);
  CHECK(shuffled.closes()[2] == 3.0);
}

TEST_CASE("csv quirks: BOM, CRLF, quotes, extra columns, gaps") {
  const CsvSchema schema;
  auto s = parse_csv("\xEF\xBB\xBFopen,\"date\",close\r\n1,2016-01-04,\"100.5\"\r\n1,2016-01-05,\r\n"
                     "1,2016-01-06,null\r\n",
                     schema, "X");
  REQUIRE(s.size() == 1);
  CHECK(s.closes()[0] == 100.5);

  CsvSchema custom{"Day", "Last", "%d/%m/%Y", ';'};
  auto c = parse_csv("Day;Last\n05/01/2016;7\n", custom, "Y");
  CHECK(c.dates()[0] == d2);
}

TEST_CASE("csv errors carry kind and row") {
  const CsvSchema schema;
  CHECK(kind_of([&] { (void)parse_csv("date,close\n2016-01-04,0\n", schema, "X"); }) ==
        ErrorKind::integrity);
  CHECK(kind_of([&] { (void)parse_csv("date,close\n2016-01-04,1\n2016-01-04,2\n", schema, "X"); }) ==
        ErrorKind::integrity);
  CHECK(kind_of([&] { (void)parse_csv("date,price\n2016-01-04,1\n", schema, "X"); }) ==
        ErrorKind::parse);
  try {
    (void)parse_csv("date,close\n2016-01-04,1\n2016-01-05,abc\n", schema, "X");
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
  }
  try {
    (void)parse_csv("date,close\n2016-13-04,1\n", schema, "X");
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(e.row() == 1);
  }
}

TEST_CASE("load_csv reads files and names series after the stem") {
  auto dir = scratch_dir("ingest_load");
  std::ofstream(dir / "abc.csv") << "date,close\n2016-01-04,1\n2016-01-05,2\n";
  auto s = load_csv(dir / "abc.csv", CsvSchema{});
  CHECK(s.id() == "abc");
  CHECK(kind_of([&] { (void)load_csv(dir / "missing.csv", CsvSchema{}); }) == ErrorKind::parse);
}

TEST_CASE("price series invariants") {
  CHECK_THROWS_AS(make("X", {d2, d1}, {1, 2}), Error);
  CHECK_THROWS_AS(make("X", {d1, d2}, {1, -2}), Error);
  CHECK_THROWS_AS(make("X", {d1}, {1, 2}), Error);
}

TEST_CASE("alignment") {
  const auto a = make("A", {d1, d2, d3}, {1, 2, 3});
  const auto b = make("B", {d1, d3}, {10, 30});
  const std::vector<PriceSeries> both{a, b};

  SUBCASE("identical dates") {
    const std::vector<PriceSeries> same{a, make("C", {d1, d2, d3}, {4, 5, 6})};
    CHECK(align(same).rows() == 3);
  }
  SUBCASE("intersection") {
    auto p = align(both, FillPolicy::intersection);
    REQUIRE(p.rows() == 2);
    CHECK(p.dates()[1] == d3);
    CHECK(p.column(0)[1] == 3.0);
    for (const auto& date : p.dates()) {
      CHECK(std::find(a.dates().begin(), a.dates().end(), date) != a.dates().end());
      CHECK(std::find(b.dates().begin(), b.dates().end(), date) != b.dates().end());
    }
  }
  SUBCASE("forward fill carries the last close") {
    auto p = align(both, FillPolicy::forward_fill);
    REQUIRE(p.rows() == 3);
    CHECK(p.column(1)[1] == 10.0);
  }
  SUBCASE("forward fill starts at the latest first date") {
    const std::vector<PriceSeries> late{a, make("L", {d2, d3}, {7, 8})};
    auto p = align(late, FillPolicy::forward_fill);
    CHECK(p.rows() == 2);
    CHECK(p.dates()[0] == d2);
  }
  SUBCASE("empty intersection") {
    const std::vector<PriceSeries> disjoint{make("A", {d1}, {1}), make("B", {d2}, {1})};
    CHECK(kind_of([&] { (void)align(disjoint); }) == ErrorKind::alignment);
  }
  SUBCASE("slice and lookup") {
    auto p = align(both);
    CHECK(p.index_of("B") == 1);
    CHECK_THROWS_AS((void)p.index_of("Z"), Error);
    CHECK(p.slice(d2, std::nullopt).rows() == 1);
    CHECK(p.head(1).rows() == 1);
  }
  CHECK(fill_policy_from_string(to_string(FillPolicy::forward_fill)) == FillPolicy::forward_fill);
}

TEST_CASE("log returns") {
  const double e = std::numbers::e;
  auto r = log_returns(make("X", {d1, d2, d3}, {1, e, e * e}));
  REQUIRE(r.values.size() == 2);
  CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.values[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.dates[0] == d2);

  auto flat = log_returns(make("X", {d1, d2, d3}, {5, 5, 5}));
  CHECK(flat.values == std::vector<double>{0.0, 0.0});

  auto one = log_returns(make("X", {d1, d2}, {100, 110}));
  CHECK(one.values[0] == doctest::Approx(0.0953102).epsilon(1e-6));

  CHECK(kind_of([&] { (void)log_returns(make("X", {d1}, {1})); }) == ErrorKind::insufficient_data);
}

TEST_CASE("reduce") {
  auto pair = reduce("X", std::vector<double>{-1.0, 1.0});
  CHECK(pair.values == std::vector<double>{-1.0, 1.0});
  CHECK(pair.sigma == 1.0);

  CHECK(kind_of([] { (void)reduce("X", std::vector<double>{0.0, 0.0, 0.0}); }) ==
        ErrorKind::degenerate_series);

  auto r = reduce("X", std::vector<double>{1.0, 2.0, 3.0});
  CHECK(std::abs(stats::mean(r.values)) < 1e-12);
  CHECK(std::abs(stats::stddev(r.values) - 1.0) < 1e-12);
  CHECK(r.mean == doctest::Approx(2.0));
  CHECK(r.sigma == doctest::Approx(std::sqrt(2.0 / 3.0)));
}

TEST_CASE("reduce is idempotent and scale free") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto y = synthetic::gaussian(500, seed, 0.02);
    const auto once = reduce("X", y);
    const auto twice = reduce("X", once.values);
    double worst = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      worst = std::max(worst, std::abs(once.values[i] - twice.values[i]));
    }
    CHECK(worst < 1e-12);

    const auto closes = synthetic::prices_from_log_returns(y, 50.0);
    auto scaled = closes;
    for (double& c : scaled) c *= 37.5;
    const auto dates = synthetic::business_days(d1, closes.size());
    const auto a = reduce(log_returns(make("X", dates, closes)));
    const auto b = reduce(log_returns(make("X", dates, scaled)));
    worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("manifest") {
  auto dir = scratch_dir("ingest_manifest");
  std::ofstream(dir / "a.csv") << "date,close\n2016-01-04,1\n2016-01-05,2\n2016-01-06,3\n";
  std::ofstream(dir / "b.csv") << "date,close\n2016-01-04,5\n2016-01-06,6\n";
  std::ofstream(dir / "m.txt") << "# panel\ntarget = B\nseries.A = a.csv\nseries.B = b.csv\n"
                                  "fill_policy = forward_fill\n";
  auto m = load_manifest(dir / "m.txt");
  CHECK(m.target == "B");
  REQUIRE(m.series.size() == 2);
  CHECK(m.series[0].path == dir / "a.csv");
  auto p = load_panel(m);
  CHECK(p.rows() == 3);
  CHECK(p.ids() == std::vector<std::string>{"A", "B"});

  CHECK_THROWS_AS((void)parse_manifest("target = Z\nseries.A = a.csv\n"), Error);
  CHECK_THROWS_AS((void)parse_manifest("series.A a.csv\n"), Error);
  CHECK_THROWS_AS((void)parse_manifest("fill_policy = sometimes\nseries.A = a.csv\n"), Error);
  CHECK(parse_manifest("series.A = a.csv\nseries.B = b.csv\n").target == "A");
}

TEST_CASE("bundled fixtures load") {
  for (const char* name : {"gaussian.manifest", "levy.manifest", "ar1.manifest", "pair.manifest",
                           "trend.manifest", "learnable.manifest", "random_walk.manifest"}) {
    CAPTURE(name);
    auto panel = load_panel(load_manifest(fixture(name)));
    CHECK(panel.rows() > 100);
  }
}

}  // TEST_SUITE
