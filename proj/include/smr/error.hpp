#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace smr {

enum class ErrorKind {
  InvalidInput,
  EmptyHospital,
  MissingStandardRate,
  ZeroExpectedRate,
  ZeroActualRate,
  UnknownHospital,
  UnknownStratum,
  UndefinedRate,
  EmptyStratum,
  ShiftExceedsStratum,
  NotConcentrated,
  DegenerateStratum,
  SameHospital,
  SameStratum,
  EmptyProbeSet,
  IncomparableProbe,
  ParameterOutOfRange,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers can branch
/// without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Ingestion failure pinned to a 1-based file row (the header is row 1).
class IngestError : public Error {
 public:
  IngestError(ErrorKind kind, std::string source, std::size_t row,
              std::optional<std::size_t> column, const std::string& reason);

  const std::string& source() const noexcept { return source_; }
  std::size_t row() const noexcept { return row_; }
  std::optional<std::size_t> column() const noexcept { return column_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string source_;
  std::size_t row_;
  std::optional<std::size_t> column_;
  std::string reason_;
};

}  // namespace smr
