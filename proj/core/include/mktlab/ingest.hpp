#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mktlab/date.hpp"

namespace mktlab {

/// Daily closing values of one instrument. Dates are strictly increasing and
/// every close is strictly positive; the constructor enforces both.
class PriceSeries {
 public:
  PriceSeries(std::string instrument_id, std::vector<Date> dates, std::vector<double> closes);

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] std::span<const Date> dates() const noexcept { return dates_; }
  [[nodiscard]] std::span<const double> closes() const noexcept { return closes_; }
  [[nodiscard]] std::size_t size() const noexcept { return dates_.size(); }

 private:
  std::string id_;
  std::vector<Date> dates_;
  std::vector<double> closes_;
};

struct CsvSchema {
  std::string date_column = "date";
  std::string close_column = "close";
  std::string date_format = "%Y-%m-%d";
  char delimiter = ',';
};

/// Read one instrument file. Rows may appear in any order; they are sorted
/// ascending. An empty close cell (or "null"/"NaN") marks a gap and the row is
/// dropped. Throws ParseError (with the data-row index) on malformed cells and
/// integrity errors on duplicate dates or non-positive closes.
[[nodiscard]] PriceSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema,
                                   std::string instrument_id = {});

/// Same as load_csv but reads from an in-memory buffer.
[[nodiscard]] PriceSeries parse_csv(std::string_view text, const CsvSchema& schema,
                                    std::string instrument_id);

enum class FillPolicy { intersection, forward_fill };

[[nodiscard]] std::string to_string(FillPolicy policy);
[[nodiscard]] FillPolicy fill_policy_from_string(std::string_view text);

/// Closing values of K instruments on one shared calendar, stored column-wise.
class AlignedPanel {
 public:
  AlignedPanel(std::vector<Date> dates, std::vector<std::string> ids,
               std::vector<std::vector<double>> columns, FillPolicy policy);

  [[nodiscard]] std::span<const Date> dates() const noexcept { return dates_; }
  [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
  [[nodiscard]] std::span<const double> column(std::size_t k) const { return columns_.at(k); }
  [[nodiscard]] std::size_t rows() const noexcept { return dates_.size(); }
  [[nodiscard]] std::size_t cols() const noexcept { return ids_.size(); }
  [[nodiscard]] FillPolicy policy() const noexcept { return policy_; }

  /// Index of the column named `id`; throws if absent.
  [[nodiscard]] std::size_t index_of(std::string_view id) const;
  [[nodiscard]] PriceSeries series(std::size_t k) const;

  /// Rows with from <= date <= to (either bound optional).
  [[nodiscard]] AlignedPanel slice(std::optional<Date> from, std::optional<Date> to) const;
  /// First `count` rows.
  [[nodiscard]] AlignedPanel head(std::size_t count) const;

 private:
  std::vector<Date> dates_;
  std::vector<std::string> ids_;
  std::vector<std::vector<double>> columns_;
  FillPolicy policy_;
};

[[nodiscard]] AlignedPanel align(std::span<const PriceSeries> series,
                                 FillPolicy policy = FillPolicy::intersection);

/// y(i) = ln x(i+1) - ln x(i), dated by the later price.
struct ReturnSeries {
  std::string id;
  std::vector<Date> dates;
  std::vector<double> values;
};

[[nodiscard]] ReturnSeries log_returns(const PriceSeries& prices);

/// Zero-mean, unit-variance version of a return series together with the
/// moments that were removed.
struct ReducedSeries {
  std::string id;
  std::vector<Date> dates;
  std::vector<double> values;
  double mean = 0.0;
  double sigma = 1.0;
};

/// Standardize with population moments. Throws degenerate_series when sigma
/// is zero (or not finite).
[[nodiscard]] ReducedSeries reduce(const ReturnSeries& returns);
[[nodiscard]] ReducedSeries reduce(std::string id, std::span<const double> values);

}  // namespace mktlab
