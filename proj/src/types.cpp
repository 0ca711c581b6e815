#include "smr/types.hpp"

#include <cmath>
#include <set>

#include "smr/error.hpp"

namespace smr {

const char* to_string(Scheme scheme) noexcept {
  return scheme == Scheme::external ? "external" : "internal";
}

namespace {

bool is_rate(double value) { return std::isfinite(value) && value >= 0.0 && value <= 1.0; }

void validate_cell(const HospitalId& hospital, const StratumId& stratum, const StratumCell& cell) {
  const std::string where = "hospital '" + hospital.str() + "' stratum '" + stratum.str() + "'";
  if (!std::isfinite(cell.count) || cell.count < 0.0) {
    throw Error(ErrorKind::InvalidInput, where + ": patient count must be a finite value >= 0");
  }
  if (cell.rate && !is_rate(*cell.rate)) {
    throw Error(ErrorKind::InvalidInput, where + ": mortality rate must lie in [0,1]");
  }
  if (cell.count > 0.0 && !cell.rate) {
    throw Error(ErrorKind::InvalidInput, where + ": populated stratum has no mortality rate");
  }
}

}  // namespace

StratumTable::StratumTable(HospitalId hospital, std::map<StratumId, StratumCell> cells)
    : hospital_(std::move(hospital)), cells_(std::move(cells)) {
  for (const auto& [stratum, cell] : cells_) validate_cell(hospital_, stratum, cell);
}

const StratumCell* StratumTable::find(const StratumId& stratum) const {
  auto it = cells_.find(stratum);
  return it == cells_.end() ? nullptr : &it->second;
}

const StratumCell& StratumTable::at(const StratumId& stratum) const {
  if (const auto* cell = find(stratum)) return *cell;
  throw Error(ErrorKind::UnknownStratum,
              "stratum '" + stratum.str() + "' not present in hospital '" + hospital_.str() + "'");
}

double StratumTable::count(const StratumId& stratum) const {
  const auto* cell = find(stratum);
  return cell ? cell->count : 0.0;
}

double StratumTable::total_count() const {
  double total = 0.0;
  for (const auto& [stratum, cell] : cells_) total += cell.count;
  return total;
}

StratumTable StratumTable::with_cell(const StratumId& stratum, StratumCell cell) const {
  auto cells = cells_;
  cells[stratum] = cell;
  return StratumTable(hospital_, std::move(cells));
}

StratumTable StratumTable::with_hospital(HospitalId hospital) const {
  return StratumTable(std::move(hospital), cells_);
}

ExternalStandard::ExternalStandard(std::map<StratumId, double> rates) : rates_(std::move(rates)) {
  for (const auto& [stratum, rate] : rates_) {
    if (!is_rate(rate)) {
      throw Error(ErrorKind::InvalidInput,
                  "standard rate for stratum '" + stratum.str() + "' must lie in [0,1]");
    }
  }
}

std::optional<double> ExternalStandard::rate(const StratumId& stratum) const {
  auto it = rates_.find(stratum);
  if (it == rates_.end()) return std::nullopt;
  return it->second;
}

ExternalStandard ExternalStandard::with_rate(const StratumId& stratum, double rate) const {
  auto rates = rates_;
  rates[stratum] = rate;
  return ExternalStandard(std::move(rates));
}

Cohort::Cohort(std::vector<StratumTable> hospitals) : hospitals_(std::move(hospitals)) {
  std::set<HospitalId> seen;
  for (const auto& table : hospitals_) {
    if (!seen.insert(table.hospital()).second) {
      throw Error(ErrorKind::InvalidInput,
                  "duplicate hospital id '" + table.hospital().str() + "' in cohort");
    }
  }
}

const StratumTable* Cohort::find(const HospitalId& hospital) const {
  for (const auto& table : hospitals_) {
    if (table.hospital() == hospital) return &table;
  }
  return nullptr;
}

const StratumTable& Cohort::at(const HospitalId& hospital) const {
  if (const auto* table = find(hospital)) return *table;
  throw Error(ErrorKind::UnknownHospital, "hospital '" + hospital.str() + "' not in cohort");
}

Cohort Cohort::with_table(StratumTable table) const {
  auto hospitals = hospitals_;
  for (auto& existing : hospitals) {
    if (existing.hospital() == table.hospital()) {
      existing = std::move(table);
      return Cohort(std::move(hospitals));
    }
  }
  throw Error(ErrorKind::UnknownHospital,
              "hospital '" + table.hospital().str() + "' not in cohort");
}

double Cohort::stratum_count(const StratumId& stratum) const {
  double total = 0.0;
  for (const auto& table : hospitals_) total += table.count(stratum);
  return total;
}

}  // namespace smr
