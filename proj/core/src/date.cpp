#include "mktlab/date.hpp"

#include <charconv>

#include <fmt/format.h>

namespace mktlab {

std::string Date::iso() const {
  const auto d = ymd();
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()),
                     static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
}

namespace {

bool read_number(std::string_view text, std::size_t& pos, std::size_t min_digits,
                 std::size_t max_digits, int& out) {
  std::size_t end = pos;
  while (end < text.size() && end - pos < max_digits && text[end] >= '0' && text[end] <= '9') {
    ++end;
  }
  if (end - pos < min_digits) return false;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + end, out);
  if (ec != std::errc{} || ptr != text.data() + end) return false;
  pos = end;
  return true;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text, std::string_view format) {
  int year = 0;
  int month = 0;
  int day = 0;
  bool have_y = false, have_m = false, have_d = false;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < format.size(); ++f) {
    if (format[f] == '%' && f + 1 < format.size()) {
      const char spec = format[++f];
      bool ok = false;
      switch (spec) {
        case 'Y': ok = read_number(text, pos, 4, 4, year); have_y = ok; break;
        case 'm': ok = read_number(text, pos, 1, 2, month); have_m = ok; break;
        case 'd': ok = read_number(text, pos, 1, 2, day); have_d = ok; break;
        case '%': ok = pos < text.size() && text[pos++] == '%'; break;
        default: return std::nullopt;
      }
      if (!ok) return std::nullopt;
    } else {
      if (pos >= text.size() || text[pos] != format[f]) return std::nullopt;
      ++pos;
    }
  }
  if (pos != text.size() || !have_y || !have_m || !have_d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{static_cast<unsigned>(month)},
                                        std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{std::chrono::sys_days{ymd}};
}

}  // namespace mktlab
