#include "smr/error.hpp"

#include <utility>

namespace smr {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::EmptyHospital: return "EmptyHospital";
    case ErrorKind::MissingStandardRate: return "MissingStandardRate";
    case ErrorKind::ZeroExpectedRate: return "ZeroExpectedRate";
    case ErrorKind::ZeroActualRate: return "ZeroActualRate";
    case ErrorKind::UnknownHospital: return "UnknownHospital";
    case ErrorKind::UnknownStratum: return "UnknownStratum";
    case ErrorKind::UndefinedRate: return "UndefinedRate";
    case ErrorKind::EmptyStratum: return "EmptyStratum";
    case ErrorKind::ShiftExceedsStratum: return "ShiftExceedsStratum";
    case ErrorKind::NotConcentrated: return "NotConcentrated";
    case ErrorKind::DegenerateStratum: return "DegenerateStratum";
    case ErrorKind::SameHospital: return "SameHospital";
    case ErrorKind::SameStratum: return "SameStratum";
    case ErrorKind::EmptyProbeSet: return "EmptyProbeSet";
    case ErrorKind::IncomparableProbe: return "IncomparableProbe";
    case ErrorKind::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

namespace {

std::string ingest_message(const std::string& source, std::size_t row,
                           std::optional<std::size_t> column, const std::string& reason) {
  std::string where = source + " row " + std::to_string(row);
  if (column) where += " column " + std::to_string(*column);
  return where + ": " + reason;
}

}  // namespace

IngestError::IngestError(ErrorKind kind, std::string source, std::size_t row,
                         std::optional<std::size_t> column, const std::string& reason)
    : Error(kind, ingest_message(source, row, column, reason)),
      source_(std::move(source)),
      row_(row),
      column_(column),
      reason_(reason) {}

}  // namespace smr
