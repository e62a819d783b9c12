#include "mktlab/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "mktlab/error.hpp"
#include "mktlab/stats.hpp"

namespace mktlab {

PriceSeries::PriceSeries(std::string instrument_id, std::vector<Date> dates,
                         std::vector<double> closes)
    : id_(std::move(instrument_id)), dates_(std::move(dates)), closes_(std::move(closes)) {
  if (dates_.size() != closes_.size()) {
    throw Error(ErrorKind::shape, fmt::format("series '{}': {} dates but {} closes", id_,
                                              dates_.size(), closes_.size()));
  }
  for (std::size_t i = 0; i < closes_.size(); ++i) {
    if (!(closes_[i] > 0.0) || !std::isfinite(closes_[i])) {
      throw Error(ErrorKind::integrity, fmt::format("series '{}': non-positive close {} on {}",
                                                    id_, closes_[i], dates_[i].iso()));
    }
    if (i > 0 && !(dates_[i - 1] < dates_[i])) {
      throw Error(ErrorKind::integrity,
                  fmt::format("series '{}': dates not strictly increasing at {}", id_,
                              dates_[i].iso()));
    }
  }
}

namespace {

std::vector<std::string> split_row(std::string_view line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool is_missing(std::string_view cell) {
  return cell.empty() || cell == "null" || cell == "NaN" || cell == "nan" || cell == "NA";
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) return i;
  }
  throw Error(ErrorKind::parse, fmt::format("header has no column named '{}'", name));
}

}  // namespace

PriceSeries parse_csv(std::string_view text, const CsvSchema& schema, std::string instrument_id) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorKind::parse, "missing header row");

  const auto header = split_row(lines.front(), schema.delimiter);
  const std::size_t date_col = find_column(header, schema.date_column);
  const std::size_t close_col = find_column(header, schema.close_column);

  std::vector<std::pair<Date, double>> rows;
  rows.reserve(lines.size());
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (trim(lines[r]).empty()) continue;
    const auto cells = split_row(lines[r], schema.delimiter);
    if (cells.size() <= std::max(date_col, close_col)) {
      throw ParseError(r, fmt::format("expected at least {} cells, got {}",
                                      std::max(date_col, close_col) + 1, cells.size()));
    }
    const auto date_text = trim(cells[date_col]);
    const auto date = parse_date(date_text, schema.date_format);
    if (!date) throw ParseError(r, fmt::format("unparsable date '{}'", date_text));

    const auto close_text = trim(cells[close_col]);
    if (is_missing(close_text)) continue;
    double close = 0.0;
    auto [ptr, ec] = std::from_chars(close_text.data(), close_text.data() + close_text.size(), close);
    if (ec != std::errc{} || ptr != close_text.data() + close_text.size()) {
      throw ParseError(r, fmt::format("unparsable close '{}'", close_text));
    }
    if (!(close > 0.0) || !std::isfinite(close)) {
      throw Error(ErrorKind::integrity,
                  fmt::format("row {}: non-positive close {} on {}", r, close, date->iso()));
    }
    rows.emplace_back(*date, close);
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Date> dates;
  std::vector<double> closes;
  dates.reserve(rows.size());
  closes.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].first == rows[i - 1].first) {
      throw Error(ErrorKind::integrity,
                  fmt::format("series '{}': duplicate date {}", instrument_id, rows[i].first.iso()));
    }
    dates.push_back(rows[i].first);
    closes.push_back(rows[i].second);
  }
  return PriceSeries(std::move(instrument_id), std::move(dates), std::move(closes));
}

PriceSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema,
                     std::string instrument_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::parse, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (instrument_id.empty()) instrument_id = path.stem().string();
  try {
    return parse_csv(buffer.str(), schema, std::move(instrument_id));
  } catch (const ParseError& e) {
    throw ParseError(e.row(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string to_string(FillPolicy policy) {
  return policy == FillPolicy::intersection ? "intersection" : "forward_fill";
}

FillPolicy fill_policy_from_string(std::string_view text) {
  if (text == "intersection") return FillPolicy::intersection;
  if (text == "forward_fill" || text == "ffill") return FillPolicy::forward_fill;
  throw Error(ErrorKind::invalid_argument, fmt::format("unknown fill policy '{}'", text));
}

AlignedPanel::AlignedPanel(std::vector<Date> dates, std::vector<std::string> ids,
                           std::vector<std::vector<double>> columns, FillPolicy policy)
    : dates_(std::move(dates)), ids_(std::move(ids)), columns_(std::move(columns)), policy_(policy) {
  if (ids_.empty()) throw Error(ErrorKind::shape, "panel needs at least one column");
  if (ids_.size() != columns_.size()) throw Error(ErrorKind::shape, "panel ids/columns mismatch");
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    if (columns_[k].size() != dates_.size()) {
      throw Error(ErrorKind::shape, fmt::format("panel column '{}' has {} values for {} dates",
                                                ids_[k], columns_[k].size(), dates_.size()));
    }
  }
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    if (!(dates_[i - 1] < dates_[i])) {
      throw Error(ErrorKind::integrity, "panel dates not strictly increasing");
    }
  }
}

std::size_t AlignedPanel::index_of(std::string_view id) const {
  const auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) {
    throw Error(ErrorKind::invalid_argument, fmt::format("panel has no series '{}'", id));
  }
  return static_cast<std::size_t>(it - ids_.begin());
}

PriceSeries AlignedPanel::series(std::size_t k) const {
  return PriceSeries(ids_.at(k), dates_, columns_.at(k));
}

AlignedPanel AlignedPanel::slice(std::optional<Date> from, std::optional<Date> to) const {
  const auto first = from ? std::lower_bound(dates_.begin(), dates_.end(), *from) : dates_.begin();
  const auto last = to ? std::upper_bound(dates_.begin(), dates_.end(), *to) : dates_.end();
  const auto lo = static_cast<std::size_t>(first - dates_.begin());
  const auto hi = std::max(lo, static_cast<std::size_t>(last - dates_.begin()));
  std::vector<std::vector<double>> cols;
  for (const auto& c : columns_) cols.emplace_back(c.begin() + lo, c.begin() + hi);
  return AlignedPanel({dates_.begin() + lo, dates_.begin() + hi}, ids_, std::move(cols), policy_);
}

AlignedPanel AlignedPanel::head(std::size_t count) const {
  count = std::min(count, dates_.size());
  std::vector<std::vector<double>> cols;
  for (const auto& c : columns_) cols.emplace_back(c.begin(), c.begin() + count);
  return AlignedPanel({dates_.begin(), dates_.begin() + count}, ids_, std::move(cols), policy_);
}

AlignedPanel align(std::span<const PriceSeries> series, FillPolicy policy) {
  if (series.empty()) throw Error(ErrorKind::alignment, "no series to align");

  std::vector<std::string> ids;
  for (const auto& s : series) ids.push_back(s.id());

  std::vector<Date> dates;
  if (policy == FillPolicy::intersection) {
    auto first = series.front().dates();
    dates.assign(first.begin(), first.end());
    for (const auto& s : series.subspan(1)) {
      std::vector<Date> next;
      std::set_intersection(dates.begin(), dates.end(), s.dates().begin(), s.dates().end(),
                            std::back_inserter(next));
      dates = std::move(next);
    }
  } else {
    Date earliest_common{};
    bool any = false;
    for (const auto& s : series) {
      if (s.size() == 0) throw Error(ErrorKind::alignment, fmt::format("series '{}' is empty", s.id()));
      if (!any || s.dates().front() > earliest_common) earliest_common = s.dates().front();
      any = true;
    }
    for (const auto& s : series) {
      std::vector<Date> merged;
      std::set_union(dates.begin(), dates.end(), s.dates().begin(), s.dates().end(),
                     std::back_inserter(merged));
      dates = std::move(merged);
    }
    std::erase_if(dates, [&](const Date& d) { return d < earliest_common; });
  }
  if (dates.empty()) throw Error(ErrorKind::alignment, "aligned calendar is empty");

  std::vector<std::vector<double>> columns;
  columns.reserve(series.size());
  for (const auto& s : series) {
    std::vector<double> col;
    col.reserve(dates.size());
    const auto sd = s.dates();
    const auto sc = s.closes();
    std::size_t j = 0;
    for (const Date& d : dates) {
      while (j + 1 < sd.size() && sd[j + 1] <= d) ++j;
      // Intersection guarantees an exact hit; forward fill carries sc[j].
      col.push_back(sc[j]);
    }
    columns.push_back(std::move(col));
  }
  return AlignedPanel(std::move(dates), std::move(ids), std::move(columns), policy);
}

ReturnSeries log_returns(const PriceSeries& prices) {
  if (prices.size() < 2) {
    throw Error(ErrorKind::insufficient_data,
                fmt::format("series '{}': need at least 2 prices for returns", prices.id()));
  }
  ReturnSeries out;
  out.id = prices.id();
  const auto closes = prices.closes();
  const auto dates = prices.dates();
  out.values.reserve(closes.size() - 1);
  out.dates.reserve(closes.size() - 1);
  for (std::size_t i = 0; i + 1 < closes.size(); ++i) {
    out.values.push_back(std::log(closes[i + 1]) - std::log(closes[i]));
    out.dates.push_back(dates[i + 1]);
  }
  return out;
}

ReducedSeries reduce(std::string id, std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::insufficient_data, "cannot reduce an empty series");
  ReducedSeries out;
  out.id = std::move(id);
  out.mean = stats::mean(values);
  out.sigma = stats::stddev(values);
  double scale = 0.0;
  for (double y : values) scale = std::max(scale, std::abs(y));
  // Constant input can leave rounding-level spread; treat it as zero.
  if (!(out.sigma > 64.0 * std::numeric_limits<double>::epsilon() * scale) ||
      !std::isfinite(out.sigma)) {
    throw Error(ErrorKind::degenerate_series,
                fmt::format("series '{}' has zero variance", out.id));
  }
  out.values.reserve(values.size());
  for (double y : values) out.values.push_back((y - out.mean) / out.sigma);
  return out;
}

ReducedSeries reduce(const ReturnSeries& returns) {
  auto out = reduce(returns.id, returns.values);
  out.dates = returns.dates;
  return out;
}

}  // namespace mktlab
