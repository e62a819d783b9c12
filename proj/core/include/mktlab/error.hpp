#pragma once

#include <stdexcept>
#include <string>

namespace mktlab {

/// Broad failure class. The CLI maps each category onto its own exit code.
enum class ErrorCategory { usage, data, numeric };

enum class ErrorKind {
  parse,
  integrity,
  alignment,
  insufficient_data,
  degenerate_series,
  shape,
  range,
  fit,
  numeric,
  contract_violation,
  invalid_argument,
};

/// Base exception for everything the library throws on bad input or failed
/// numerics. `kind()` identifies the failure; `what()` carries the context.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  [[nodiscard]] ErrorCategory category() const noexcept;

 private:
  ErrorKind kind_;
};

[[nodiscard]] const char* to_string(ErrorKind kind) noexcept;

/// Malformed input row; `row()` is the 1-based data row (header excluded).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& message);
  [[nodiscard]] std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Window whose standard deviation vanished for one series.
class DegenerateWindowError : public Error {
 public:
  explicit DegenerateWindowError(std::string series_id);
  [[nodiscard]] const std::string& series_id() const noexcept { return series_id_; }

 private:
  std::string series_id_;
};

}  // namespace mktlab
