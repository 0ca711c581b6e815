#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smr/types.hpp"

namespace smr {

inline constexpr std::string_view kHospitalsHeader = "hospital_id,stratum_id,patients,mortality_rate";
inline constexpr std::string_view kStandardHeader = "stratum_id,expected_rate";

struct CsvOptions {
  /// Reject fractional patient counts.
  bool integer_counts = false;
};

/// Hospitals keep their order of first appearance. Throws IngestError with
/// ParseError (malformed field, wrong header or column count) or
/// ValidationError (duplicate key, rate outside [0,1], missing rate).
Cohort parse_hospitals_csv(std::string_view text, const std::string& source = "hospitals.csv",
                           const CsvOptions& options = {});
ExternalStandard parse_standard_csv(std::string_view text, const std::string& source = "standard.csv");

std::string emit_hospitals_csv(const Cohort& cohort);
std::string emit_standard_csv(const ExternalStandard& standard);

/// Throws InvalidInput when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

struct Ingested {
  Cohort cohort;
  std::optional<ExternalStandard> standard;
};

Ingested ingest(const std::filesystem::path& hospitals, const std::optional<std::filesystem::path>& standard,
                const CsvOptions& options = {});

/// Shortest text that parses back to the same double.
std::string shortest_number(double value);
/// 17 significant digits.
std::string report_number(double value);

/// Splits one CSV record; handles double-quoted fields.
std::vector<std::string> split_csv_record(std::string_view line);
std::string quote_csv_field(std::string_view field);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

}  // namespace smr
