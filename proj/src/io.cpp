#include "smr/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "smr/error.hpp"

namespace smr {

namespace {

struct Line {
  std::size_t row;
  std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<Line> lines;
  std::size_t row = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    auto line = text.substr(0, end);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({++row, line});
    if (end == std::string_view::npos) break;
    text.remove_prefix(end + 1);
  }
  while (!lines.empty() && lines.back().text.empty()) lines.pop_back();
  return lines;
}

class RowReader {
 public:
  RowReader(const std::string& source, std::size_t row, std::string_view line, std::size_t columns)
      : source_(source), row_(row) {
    try {
      fields_ = split_csv_record(line);
    } catch (const Error& e) {
      throw IngestError(ErrorKind::ParseError, source_, row_, std::nullopt, e.what());
    }
    if (fields_.size() != columns) {
      throw IngestError(ErrorKind::ParseError, source_, row_, std::nullopt,
                        "expected " + std::to_string(columns) + " fields, found " + std::to_string(fields_.size()));
    }
  }

  const std::string& text(std::size_t column) const { return fields_[column]; }

  std::string id(std::size_t column, const char* what) const {
    if (fields_[column].empty()) invalid(std::string(what) + " is empty");
    return fields_[column];
  }

  std::optional<double> number(std::size_t column, bool optional) const {
    const auto& field = fields_[column];
    if (field.empty()) {
      if (optional) return std::nullopt;
      throw IngestError(ErrorKind::ParseError, source_, row_, column + 1, "missing number");
    }
    double value = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw IngestError(ErrorKind::ParseError, source_, row_, column + 1, "'" + field + "' is not a number");
    }
    if (!std::isfinite(value)) invalid("'" + field + "' is not finite");
    return value;
  }

  [[noreturn]] void invalid(const std::string& reason) const {
    throw IngestError(ErrorKind::ValidationError, source_, row_, std::nullopt, reason);
  }

 private:
  const std::string& source_;
  std::size_t row_;
  std::vector<std::string> fields_;
};

void check_header(const std::vector<Line>& lines, std::string_view expected, const std::string& source) {
  if (lines.empty()) throw IngestError(ErrorKind::ParseError, source, 1, std::nullopt, "missing header");
  if (lines.front().text != expected) {
    throw IngestError(ErrorKind::ParseError, source, 1, std::nullopt,
                      "header must be '" + std::string(expected) + "'");
  }
}

}  // namespace

std::vector<std::string> split_csv_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  std::size_t i = 0;
  for (;;) {
    field.clear();
    if (i < line.size() && line[i] == '"') {
      ++i;
      for (;;) {
        if (i >= line.size()) throw Error(ErrorKind::ParseError, "unterminated quoted field");
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        field.push_back(line[i++]);
      }
      if (i < line.size() && line[i] != ',') throw Error(ErrorKind::ParseError, "text after closing quote");
    } else {
      while (i < line.size() && line[i] != ',') {
        if (line[i] == '"') throw Error(ErrorKind::ParseError, "quote inside unquoted field");
        field.push_back(line[i++]);
      }
    }
    fields.push_back(field);
    if (i >= line.size()) break;
    ++i;
  }
  return fields;
}

std::string quote_csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Cohort parse_hospitals_csv(std::string_view text, const std::string& source, const CsvOptions& options) {
  const auto lines = split_lines(text);
  check_header(lines, kHospitalsHeader, source);

  std::vector<std::pair<HospitalId, std::map<StratumId, StratumCell>>> hospitals;
  std::map<HospitalId, std::size_t> position;
  std::set<std::pair<HospitalId, StratumId>> seen;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const RowReader row(source, lines[i].row, lines[i].text, 4);
    const HospitalId hospital(row.id(0, "hospital_id"));
    const StratumId stratum(row.id(1, "stratum_id"));
    const double patients = *row.number(2, false);
    const auto rate = row.number(3, true);

    if (!seen.emplace(hospital, stratum).second) {
      row.invalid("duplicate row for hospital '" + hospital.str() + "', stratum '" + stratum.str() + "'");
    }
    if (patients < 0.0) row.invalid("patients must be non-negative");
    if (options.integer_counts && patients != std::floor(patients)) row.invalid("patients must be an integer");
    if (rate && (*rate < 0.0 || *rate > 1.0)) row.invalid("mortality_rate must lie in [0, 1]");
    if (patients > 0.0 && !rate) row.invalid("mortality_rate is required when patients > 0");

    auto [it, inserted] = position.emplace(hospital, hospitals.size());
    if (inserted) hospitals.emplace_back(hospital, std::map<StratumId, StratumCell>{});
    hospitals[it->second].second.emplace(stratum, StratumCell{patients, rate});
  }

  std::vector<StratumTable> tables;
  tables.reserve(hospitals.size());
  for (auto& [id, cells] : hospitals) tables.emplace_back(id, std::move(cells));
  return Cohort(std::move(tables));
}

ExternalStandard parse_standard_csv(std::string_view text, const std::string& source) {
  const auto lines = split_lines(text);
  check_header(lines, kStandardHeader, source);
  std::map<StratumId, double> rates;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const RowReader row(source, lines[i].row, lines[i].text, 2);
    const StratumId stratum(row.id(0, "stratum_id"));
    const double rate = *row.number(1, false);
    if (rate < 0.0 || rate > 1.0) row.invalid("expected_rate must lie in [0, 1]");
    if (!rates.emplace(stratum, rate).second) row.invalid("duplicate stratum '" + stratum.str() + "'");
  }
  return ExternalStandard(std::move(rates));
}

std::string emit_hospitals_csv(const Cohort& cohort) {
  std::string out(kHospitalsHeader);
  out += '\n';
  for (const auto& table : cohort.hospitals()) {
    for (const auto& [stratum, cell] : table.cells()) {
      out += quote_csv_field(table.hospital().str());
      out += ',';
      out += quote_csv_field(stratum.str());
      out += ',';
      out += shortest_number(cell.count);
      out += ',';
      if (cell.rate) out += shortest_number(*cell.rate);
      out += '\n';
    }
  }
  return out;
}

std::string emit_standard_csv(const ExternalStandard& standard) {
  std::string out(kStandardHeader);
  out += '\n';
  for (const auto& [stratum, rate] : standard.rates()) {
    out += quote_csv_field(stratum.str());
    out += ',';
    out += shortest_number(rate);
    out += '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Ingested ingest(const std::filesystem::path& hospitals, const std::optional<std::filesystem::path>& standard,
                const CsvOptions& options) {
  Ingested out;
  out.cohort = parse_hospitals_csv(read_file(hospitals), hospitals.string(), options);
  if (standard) out.standard = parse_standard_csv(read_file(*standard), standard->string());
  return out;
}

std::string shortest_number(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

std::string report_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  std::string out(buffer);
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::InvalidInput, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace smr
