#include "smr/core.hpp"

#include <algorithm>

namespace smr {

double actual_deaths(const StratumTable& table) {
  double deaths = 0.0;
  for (const auto& [stratum, cell] : table.cells()) {
    if (cell.count > 0.0) deaths += cell.count * *cell.rate;
  }
  return deaths;
}

double expected_deaths(const StratumTable& table, const std::map<StratumId, double>& rates) {
  double deaths = 0.0;
  for (const auto& [stratum, cell] : table.cells()) {
    if (cell.count <= 0.0) continue;
    auto it = rates.find(stratum);
    if (it == rates.end()) {
      throw Error(ErrorKind::MissingStandardRate,
                  "no standard rate for stratum '" + stratum.str() + "' (hospital '" +
                      table.hospital().str() + "')");
    }
    deaths += cell.count * it->second;
  }
  return deaths;
}

namespace {

double require_patients(const StratumTable& table) {
  const double total = table.total_count();
  if (!(total > 0.0)) {
    throw Error(ErrorKind::EmptyHospital, "hospital '" + table.hospital().str() + "' has no patients");
  }
  return total;
}

}  // namespace

double actual_rate(const StratumTable& table) {
  const double total = require_patients(table);
  return actual_deaths(table) / total;
}

double expected_rate_external(const StratumTable& table, const ExternalStandard& standard) {
  const double total = require_patients(table);
  return expected_deaths(table, standard.rates()) / total;
}

SmrResult make_result(const StratumTable& table, double expected, Scheme scheme) {
  const double total = require_patients(table);
  if (!(expected > 0.0)) {
    throw Error(ErrorKind::ZeroExpectedRate,
                "hospital '" + table.hospital().str() + "' has an expected mortality rate of 0");
  }
  const double actual = actual_deaths(table);
  return SmrResult{table.hospital(), actual / total, expected / total, actual / expected, scheme};
}

SmrResult smr_external(const StratumTable& table, const ExternalStandard& standard) {
  require_patients(table);
  return make_result(table, expected_deaths(table, standard.rates()), Scheme::external);
}

InternalStandard internal_standard(const Cohort& cohort) {
  std::vector<const StratumTable*> ordered;
  ordered.reserve(cohort.size());
  for (const auto& table : cohort.hospitals()) ordered.push_back(&table);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->hospital() < b->hospital(); });

  std::map<StratumId, std::pair<double, double>> sums;  // patients, deaths
  for (const auto* table : ordered) {
    for (const auto& [stratum, cell] : table->cells()) {
      if (cell.count <= 0.0) continue;
      auto& [patients, deaths] = sums[stratum];
      patients += cell.count;
      deaths += cell.count * *cell.rate;
    }
  }

  InternalStandard standard;
  for (const auto& [stratum, sum] : sums) standard.emplace(stratum, sum.second / sum.first);
  return standard;
}

double expected_rate_internal(const Cohort& cohort, const HospitalId& hospital) {
  const auto& table = cohort.at(hospital);
  const double total = require_patients(table);
  return expected_deaths(table, internal_standard(cohort)) / total;
}

SmrResult smr_internal(const Cohort& cohort, const HospitalId& hospital) {
  const auto& table = cohort.at(hospital);
  require_patients(table);
  return make_result(table, expected_deaths(table, internal_standard(cohort)), Scheme::internal);
}

std::vector<SmrResult> smr_internal_all(const Cohort& cohort) {
  const auto standard = internal_standard(cohort);
  std::vector<SmrResult> results;
  results.reserve(cohort.size());
  for (const auto& table : cohort.hospitals()) {
    require_patients(table);
    results.push_back(make_result(table, expected_deaths(table, standard), Scheme::internal));
  }
  return results;
}

}  // namespace smr
