#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace mktlab {

/// Calendar date at day resolution.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
  constexpr Date(int year, unsigned month, unsigned day)
      : days_(std::chrono::year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}}) {}

  [[nodiscard]] constexpr std::chrono::sys_days days() const noexcept { return days_; }
  [[nodiscard]] std::chrono::year_month_day ymd() const noexcept { return days_; }

  /// YYYY-MM-DD.
  [[nodiscard]] std::string iso() const;

  [[nodiscard]] constexpr Date plus_days(int n) const noexcept {
    return Date{days_ + std::chrono::days{n}};
  }

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

/// Parse `text` against a strftime-like `format`. Supported conversions are
/// %Y (4-digit year), %m and %d (1-2 digits); every other character must
/// match literally. Returns nullopt on mismatch or an invalid calendar date.
[[nodiscard]] std::optional<Date> parse_date(std::string_view text,
                                             std::string_view format = "%Y-%m-%d");

}  // namespace mktlab
