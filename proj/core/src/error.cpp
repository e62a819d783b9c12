#include "mktlab/error.hpp"

namespace mktlab {

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

ErrorCategory Error::category() const noexcept {
  switch (kind_) {
    case ErrorKind::range:
    case ErrorKind::invalid_argument:
      return ErrorCategory::usage;
    case ErrorKind::fit:
    case ErrorKind::numeric:
      return ErrorCategory::numeric;
    default:
      return ErrorCategory::data;
  }
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::integrity: return "integrity error";
    case ErrorKind::alignment: return "alignment error";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::degenerate_series: return "degenerate series";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::range: return "range error";
    case ErrorKind::fit: return "fit error";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::contract_violation: return "contract violation";
    case ErrorKind::invalid_argument: return "invalid argument";
  }
  return "error";
}

ParseError::ParseError(std::size_t row, const std::string& message)
    : Error(ErrorKind::parse, "row " + std::to_string(row) + ": " + message), row_(row) {}

DegenerateWindowError::DegenerateWindowError(std::string series_id)
    : Error(ErrorKind::degenerate_series,
            "zero standard deviation in window for series '" + series_id + "'"),
      series_id_(std::move(series_id)) {}

}  // namespace mktlab
