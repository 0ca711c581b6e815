#include "smr/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace smr {

const char* to_string(Direction direction) noexcept {
  switch (direction) {
    case Direction::increase: return "increase";
    case Direction::zero: return "zero";
    case Direction::decrease: return "decrease";
  }
  return "zero";
}

Direction classify(double value, double zero_tolerance) noexcept {
  if (std::abs(value) <= zero_tolerance) return Direction::zero;
  return value > 0.0 ? Direction::increase : Direction::decrease;
}

bool fd_agrees(const SensitivityReport& report, double exact) {
  if (!report.fd_check) return true;
  const double diff = std::abs(report.value - *report.fd_check);
  if (report.check_kind == CheckKind::direct_recompute) return diff <= exact;
  return diff <= 1e-5 * std::max(std::abs(report.value), 1e-3);
}

namespace {

using Evaluate = std::function<double(double)>;

/// Derivative of f along a parameter that may move down by `room_down` and up
/// by `room_up` before leaving its domain. Central where the step fits on
/// both sides, one-sided at a boundary.
std::optional<double> derivative(const Evaluate& f, double room_down, double room_up, double h) {
  const bool down = room_down >= h;
  const bool up = room_up >= h;
  if (down && up) return (f(h) - f(-h)) / (2.0 * h);
  if (up) return (f(h) - f(0.0)) / h;
  if (down) return (f(0.0) - f(-h)) / h;
  return std::nullopt;
}

std::optional<double> rate_derivative(const Evaluate& f, double rate, double h) {
  return derivative(f, rate, 1.0 - rate, h);
}

SensitivityReport make_report(std::string analysis, double value, const AnalysisOptions& options) {
  SensitivityReport report;
  report.analysis = std::move(analysis);
  report.value = value;
  report.sign = classify(value, options.zero_tolerance);
  return report;
}

const char* pick(Direction d, const char* increase, const char* zero, const char* decrease) {
  switch (d) {
    case Direction::increase: return increase;
    case Direction::zero: return zero;
    case Direction::decrease: return decrease;
  }
  return zero;
}

double defined_rate(const StratumTable& table, const StratumId& stratum) {
  const auto& cell = table.at(stratum);
  if (!cell.rate) {
    throw Error(ErrorKind::UndefinedRate, "hospital '" + table.hospital().str() + "' stratum '" +
                                              stratum.str() + "' has no mortality rate");
  }
  return *cell.rate;
}

double standard_rate(const ExternalStandard& standard, const StratumId& stratum) {
  auto rate = standard.rate(stratum);
  if (!rate) {
    throw Error(ErrorKind::MissingStandardRate, "no standard rate for stratum '" + stratum.str() + "'");
  }
  return *rate;
}

struct StratumSums {
  double patients = 0.0;
  double deaths = 0.0;
};

/// Cohort-wide (n_s, Σ_j n_js p_js), accumulated in hospital-id order like
/// internal_standard.
std::map<StratumId, StratumSums> stratum_sums(const Cohort& cohort) {
  std::vector<const StratumTable*> ordered;
  for (const auto& table : cohort.hospitals()) ordered.push_back(&table);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->hospital() < b->hospital(); });
  std::map<StratumId, StratumSums> sums;
  for (const auto* table : ordered) {
    for (const auto& [stratum, cell] : table->cells()) {
      if (cell.count <= 0.0) continue;
      auto& s = sums[stratum];
      s.patients += cell.count;
      s.deaths += cell.count * *cell.rate;
    }
  }
  return sums;
}

/// Closed-form inputs shared by the internal-standard operations.
struct InternalState {
  const StratumTable* table = nullptr;
  InternalStandard standard;
  double patients = 0.0;
  double actual = 0.0;
  double expected = 0.0;
  double smr = 0.0;
};

InternalState internal_state(const Cohort& cohort, const HospitalId& hospital) {
  InternalState state;
  state.table = &cohort.at(hospital);
  state.standard = internal_standard(cohort);
  state.expected = expected_deaths(*state.table, state.standard);
  state.smr = make_result(*state.table, state.expected, Scheme::internal).smr;
  state.patients = state.table->total_count();
  state.actual = actual_deaths(*state.table);
  return state;
}

double internal_smr_with_rate(const Cohort& cohort, const HospitalId& owner,
                              const HospitalId& target, const StratumId& stratum, double rate) {
  const auto& table = cohort.at(owner);
  auto cell = table.at(stratum);
  cell.rate = rate;
  return smr_internal(cohort.with_table(table.with_cell(stratum, cell)), target).smr;
}

}  // namespace

// Case mix ------------------------------------------------------------------

StratumTable shift_case_mix(const StratumTable& table, const CaseMixShift& shift,
                            const AnalysisOptions& options) {
  if (!std::isfinite(shift.eta) || shift.eta < 0.0) {
    throw Error(ErrorKind::InvalidInput, "shift size must be a finite value >= 0");
  }
  if (options.integer_shifts && std::floor(shift.eta) != shift.eta) {
    throw Error(ErrorKind::InvalidInput, "integer mode requires a whole number of patients");
  }
  if (shift.from == shift.to) {
    throw Error(ErrorKind::SameStratum, "shift source and target are both '" + shift.from.str() + "'");
  }
  auto from = table.at(shift.from);
  auto to = table.at(shift.to);
  if (shift.eta > from.count) {
    throw Error(ErrorKind::ShiftExceedsStratum,
                "cannot move " + std::to_string(shift.eta) + " patients out of stratum '" +
                    shift.from.str() + "' holding " + std::to_string(from.count));
  }
  if (shift.eta == 0.0) return table;
  if (!to.rate) {
    throw Error(ErrorKind::UndefinedRate,
                "receiving stratum '" + shift.to.str() + "' has no mortality rate");
  }
  from.count -= shift.eta;
  to.count += shift.eta;
  return table.with_cell(shift.from, from).with_cell(shift.to, to);
}

SensitivityReport omega_external(const StratumTable& table, const ExternalStandard& standard,
                                 const CaseMixShift& shift, const AnalysisOptions& options) {
  const auto shifted = shift_case_mix(table, shift, options);
  const auto original = smr_external(table, standard);
  if (shift.eta == 0.0) {
    auto report = make_report("omega_external", 0.0, options);
    report.condition = "eta = 0 (identity)";
    report.fd_check = 0.0;
    report.diagnostics["smr"] = original.smr;
    return report;
  }

  const double rate_k = defined_rate(table, shift.to);
  const double rate_l = defined_rate(table, shift.from);
  const double expected_diff = standard_rate(standard, shift.to) - standard_rate(standard, shift.from);
  const double actual_diff = rate_k - rate_l;
  const double expected = expected_deaths(table, standard.rates());

  const double numerator = actual_diff - expected_diff * original.smr;
  const double denominator = expected / shift.eta + expected_diff;
  auto report = make_report("omega_external", numerator / denominator, options);
  report.condition = pick(report.sign, "p_hk - p_hl > (pe_k - pe_l) * SMR",
                          "p_hk - p_hl = (pe_k - pe_l) * SMR", "p_hk - p_hl < (pe_k - pe_l) * SMR");
  report.fd_check = smr_external(shifted, standard).smr - original.smr;
  report.diagnostics = {{"smr", original.smr},
                        {"actual_rate_difference", actual_diff},
                        {"expected_rate_difference", expected_diff},
                        {"threshold", expected_diff * original.smr},
                        {"eta", shift.eta}};
  return report;
}

double concentrated_smr_external(const StratumTable& table, const ExternalStandard& standard,
                                 const StratumId& stratum) {
  const auto& cell = table.at(stratum);
  for (const auto& [other, other_cell] : table.cells()) {
    if (other != stratum && other_cell.count > 0.0) {
      throw Error(ErrorKind::NotConcentrated,
                  "stratum '" + other.str() + "' is also populated in hospital '" +
                      table.hospital().str() + "'");
    }
  }
  if (!(cell.count > 0.0)) {
    throw Error(ErrorKind::EmptyHospital, "hospital '" + table.hospital().str() + "' has no patients");
  }
  const double expected = standard_rate(standard, stratum);
  if (!(expected > 0.0)) {
    throw Error(ErrorKind::ZeroExpectedRate, "standard rate of stratum '" + stratum.str() + "' is 0");
  }
  return *cell.rate / expected;
}

// Scale ---------------------------------------------------------------------

StratumTable scale_hospital(const StratumTable& table, const ScaleChange& scale) {
  if (!std::isfinite(scale.lambda) || !(scale.lambda > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "scale factor must be a finite value > 0");
  }
  auto cells = table.cells();
  for (auto& [stratum, cell] : cells) cell.count *= scale.lambda;
  return StratumTable(table.hospital(), std::move(cells));
}

SensitivityReport scale_invariance_external(const StratumTable& table,
                                            const ExternalStandard& standard,
                                            const ScaleChange& scale,
                                            const AnalysisOptions& options) {
  const auto scaled = scale_hospital(table, scale);
  const double before = smr_external(table, standard).smr;
  const double after = smr_external(scaled, standard).smr;
  auto report = make_report("scale_invariance_external", 0.0, options);
  report.condition = "SMR(lambda n) = SMR(n)";
  report.fd_check = after - before;
  report.diagnostics = {{"smr", before}, {"smr_scaled", after}, {"lambda", scale.lambda}};
  return report;
}

// Rates under an external standard ------------------------------------------

SensitivityReport me_actual_external(const StratumTable& table, const ExternalStandard& standard,
                                     const StratumId& stratum, const AnalysisOptions& options) {
  const auto original = smr_external(table, standard);
  const auto& cell = table.at(stratum);
  const double expected = expected_deaths(table, standard.rates());
  const double n_h = table.total_count();

  if (cell.count == 0.0) {
    auto report = make_report("me_actual_external", 0.0, options);
    report.condition = "n_hk = 0";
    report.fd_check = 0.0;
    return report;
  }

  auto report = make_report("me_actual_external", (cell.count / n_h) / (expected / n_h), options);
  report.condition = pick(report.sign, "n_hk > 0", "n_hk = 0", "n_hk < 0");
  report.check_kind = CheckKind::central_difference;
  const double rate = *cell.rate;
  report.fd_check = rate_derivative(
      [&](double step) {
        auto perturbed = cell;
        perturbed.rate = rate + step;
        return smr_external(table.with_cell(stratum, perturbed), standard).smr;
      },
      rate, options.fd_step);
  report.diagnostics = {{"smr", original.smr},
                        {"share", cell.count / n_h},
                        {"expected_rate", original.expected_rate}};
  return report;
}

SensitivityReport dsmr_uniform_actual_external(const StratumTable& table,
                                               const ExternalStandard& standard, double dp,
                                               const AnalysisOptions& options) {
  const auto original = smr_external(table, standard);
  auto report = make_report("dsmr_uniform_actual_external", dp / original.expected_rate, options);
  report.condition = pick(report.sign, "dp > 0", "dp = 0", "dp < 0");
  report.check_kind = CheckKind::central_difference;

  double room_down = 1.0;
  double room_up = 1.0;
  for (const auto& [stratum, cell] : table.cells()) {
    if (cell.count <= 0.0) continue;
    room_down = std::min(room_down, *cell.rate);
    room_up = std::min(room_up, 1.0 - *cell.rate);
  }
  auto slope = derivative(
      [&](double step) {
        auto cells = table.cells();
        for (auto& [stratum, cell] : cells) {
          if (cell.count > 0.0) *cell.rate += step;
        }
        return smr_external(StratumTable(table.hospital(), std::move(cells)), standard).smr;
      },
      room_down, room_up, options.fd_step);
  if (slope) report.fd_check = *slope * dp;
  report.diagnostics = {{"smr", original.smr}, {"expected_rate", original.expected_rate}, {"dp", dp}};
  return report;
}

SensitivityReport me_expected_external(const StratumTable& table,
                                       const ExternalStandard& standard,
                                       const StratumId& stratum, const AnalysisOptions& options) {
  const auto original = smr_external(table, standard);
  const auto& cell = table.at(stratum);
  const double expected = expected_deaths(table, standard.rates());

  if (cell.count == 0.0) {
    auto report = make_report("me_expected_external", 0.0, options);
    report.condition = "n_hk = 0";
    report.fd_check = 0.0;
    return report;
  }

  auto report = make_report("me_expected_external", -original.smr * cell.count / expected, options);
  report.condition = pick(report.sign, "SMR < 0", "SMR = 0", "n_hk > 0 and SMR > 0");
  report.check_kind = CheckKind::central_difference;
  const double rate = standard_rate(standard, stratum);
  report.fd_check = rate_derivative(
      [&](double step) {
        return smr_external(table, standard.with_rate(stratum, rate + step)).smr;
      },
      rate, options.fd_step);
  report.diagnostics = {{"smr", original.smr},
                        {"share", cell.count / table.total_count()},
                        {"expected_rate", original.expected_rate}};
  return report;
}

SensitivityReport dsmr_uniform_expected_external(const StratumTable& table,
                                                 const ExternalStandard& standard, double dp,
                                                 const AnalysisOptions& options) {
  const auto original = smr_external(table, standard);
  auto report = make_report("dsmr_uniform_expected_external",
                            -original.smr * dp / original.expected_rate, options);
  report.condition = pick(report.sign, "SMR > 0 and dp < 0", "SMR = 0 or dp = 0", "SMR > 0 and dp > 0");
  report.check_kind = CheckKind::central_difference;

  double room_down = 1.0;
  double room_up = 1.0;
  for (const auto& [stratum, cell] : table.cells()) {
    if (cell.count <= 0.0) continue;
    const double rate = standard_rate(standard, stratum);
    room_down = std::min(room_down, rate);
    room_up = std::min(room_up, 1.0 - rate);
  }
  auto slope = derivative(
      [&](double step) {
        auto rates = standard.rates();
        for (const auto& [stratum, cell] : table.cells()) {
          if (cell.count > 0.0) rates[stratum] += step;
        }
        return smr_external(table, ExternalStandard(std::move(rates))).smr;
      },
      room_down, room_up, options.fd_step);
  if (slope) report.fd_check = *slope * dp;
  report.diagnostics = {{"smr", original.smr}, {"expected_rate", original.expected_rate}, {"dp", dp}};
  return report;
}

// Internal standardization --------------------------------------------------

SensitivityReport omega_internal(const Cohort& cohort, const HospitalId& hospital,
                                 const CaseMixShift& shift, const AnalysisOptions& options) {
  const auto state = internal_state(cohort, hospital);
  const auto& table = *state.table;
  const auto shifted = shift_case_mix(table, shift, options);
  if (shift.eta == 0.0) {
    auto report = make_report("omega_internal", 0.0, options);
    report.condition = "eta = 0 (identity)";
    report.fd_check = 0.0;
    report.diagnostics["smr"] = state.smr;
    return report;
  }

  const double eta = shift.eta;
  const double rate_k = defined_rate(table, shift.to);
  const double rate_l = defined_rate(table, shift.from);
  const double n_hk = table.count(shift.to);
  const double n_hl = table.count(shift.from);
  const double n_k = cohort.stratum_count(shift.to);
  const double n_l = cohort.stratum_count(shift.from);
  const double mean_l = state.standard.at(shift.from);
  // An empty receiving stratum has no cohort average; α_hk = 1 there.
  const double mean_k = n_k > 0.0 ? state.standard.at(shift.to) : 0.0;

  auto report = make_report("omega_internal", 0.0, options);

  const double alpha_k = (n_hk + eta) / (n_k + eta);
  double alpha_l = 0.0;
  if (n_l - eta <= options.zero_tolerance * std::max(1.0, n_l)) {
    // Stratum l emptied cohort-wide: the weight is 0/0. Keep the pre-shift
    // share; p̄_l = p_hl here so the threshold rate does not depend on it.
    alpha_l = n_hl / n_l;
    report.degenerate = true;
    report.notes.push_back("stratum '" + shift.from.str() +
                           "' is emptied cohort-wide; alpha_hl taken as n_hl/n_l");
  } else {
    alpha_l = (n_hl - eta) / (n_l - eta);
  }

  const double threshold_k = alpha_k * rate_k + (1.0 - alpha_k) * mean_k;
  const double threshold_l = alpha_l * rate_l + (1.0 - alpha_l) * mean_l;
  const double actual_diff = rate_k - rate_l;
  const double threshold_diff = threshold_k - threshold_l;

  report.value = (actual_diff - threshold_diff * state.smr) / (state.expected / eta + threshold_diff);
  report.sign = classify(report.value, options.zero_tolerance);
  report.condition = pick(report.sign, "p_hk - p_hl > (pt_hk - pt_hl) * SMR",
                          "p_hk - p_hl = (pt_hk - pt_hl) * SMR", "p_hk - p_hl < (pt_hk - pt_hl) * SMR");
  report.fd_check = smr_internal(cohort.with_table(shifted), hospital).smr - state.smr;

  const double one = 1.0 - options.zero_tolerance;
  if (alpha_k >= one && alpha_l >= one) {
    report.notes.push_back("regime: own-reference (alpha_hk = alpha_hl = 1)");
  } else if (alpha_k < 1e-6 && alpha_l < 1e-6) {
    report.notes.push_back("regime: negligible share (alpha -> 0)");
  }
  report.diagnostics = {{"smr", state.smr},
                        {"alpha_hk", alpha_k},
                        {"alpha_hl", alpha_l},
                        {"threshold_rate_k", threshold_k},
                        {"threshold_rate_l", threshold_l},
                        {"actual_rate_difference", actual_diff},
                        {"threshold_rate_difference", threshold_diff},
                        {"eta", eta}};
  return report;
}

double smr_internal_scaled(const Cohort& cohort, const HospitalId& hospital, double lambda) {
  return smr_internal(cohort.with_table(scale_hospital(cohort.at(hospital), ScaleChange{lambda})),
                      hospital)
      .smr;
}

SensitivityReport delta_smr_scale_internal(const Cohort& cohort, const HospitalId& hospital,
                                           const ScaleChange& scale,
                                           const AnalysisOptions& options) {
  if (!std::isfinite(scale.lambda) || !(scale.lambda > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "scale factor must be a finite value > 0");
  }
  const auto state = internal_state(cohort, hospital);
  const auto& table = *state.table;
  const auto sums = stratum_sums(cohort);
  const double lambda = scale.lambda;

  auto report = make_report("delta_smr_scale_internal", 0.0, options);
  double expected_scaled = 0.0;
  double weighted_change = 0.0;
  for (const auto& [stratum, cell] : table.cells()) {
    if (cell.count <= 0.0) continue;
    const auto& s = sums.at(stratum);
    const double extra = (lambda - 1.0) * cell.count;
    const double before = s.deaths / s.patients;
    const double after = (s.deaths + extra * *cell.rate) / (s.patients + extra);
    expected_scaled += cell.count * after;
    weighted_change += cell.count / state.patients * (before - after);

    StratumEffect effect;
    effect.stratum = stratum;
    effect.value = before - after;
    effect.direction = classify(effect.value, options.zero_tolerance);
    effect.condition = pick(classify(*cell.rate - before, options.zero_tolerance),
                            "p_hs > pbar_s", "p_hs = pbar_s", "p_hs < pbar_s");
    report.strata.push_back(std::move(effect));
  }

  report.value = state.smr * (state.expected / expected_scaled - 1.0);
  report.sign = classify(report.value, options.zero_tolerance);
  report.condition = pick(report.sign, "sum_s (n_hs/n_h)[pe_s(n_hs) - pe_s(lambda n_hs)] > 0",
                          "sum_s (n_hs/n_h)[pe_s(n_hs) - pe_s(lambda n_hs)] = 0",
                          "sum_s (n_hs/n_h)[pe_s(n_hs) - pe_s(lambda n_hs)] < 0");
  report.fd_check = smr_internal_scaled(cohort, hospital, lambda) - state.smr;
  report.diagnostics = {{"smr", state.smr},
                        {"smr_scaled", state.actual / expected_scaled},
                        {"expected_rate", state.expected / state.patients},
                        {"expected_rate_scaled", expected_scaled / state.patients},
                        {"weighted_standard_change", weighted_change},
                        {"lambda", lambda}};
  return report;
}

double smr_internal_scale_limit(const Cohort& cohort, const HospitalId& hospital) {
  const auto& table = cohort.at(hospital);
  if (!(actual_rate(table) > 0.0)) {
    throw Error(ErrorKind::ZeroActualRate,
                "hospital '" + hospital.str() + "' has no deaths; the scaled SMR is 0/0 in the limit");
  }
  return 1.0;
}

SensitivityReport me_actual_internal(const Cohort& cohort, const HospitalId& hospital,
                                     const StratumId& stratum, const AnalysisOptions& options) {
  const auto state = internal_state(cohort, hospital);
  const auto& cell = state.table->at(stratum);
  if (cell.count == 0.0) {
    auto report = make_report("me_actual_internal", 0.0, options);
    report.condition = "n_hk = 0";
    report.fd_check = 0.0;
    report.diagnostics["smr"] = state.smr;
    return report;
  }

  const double n_k = cohort.stratum_count(stratum);
  const double share = cell.count / state.patients;
  const double direct = share / (state.expected / state.patients);
  const double value = direct * (1.0 - state.smr * cell.count / n_k);
  auto report = make_report("me_actual_internal", value, options);
  report.condition = pick(report.sign, "SMR < n_k/n_hk", "SMR = n_k/n_hk", "SMR > n_k/n_hk");
  report.check_kind = CheckKind::central_difference;
  const double rate = *cell.rate;
  report.fd_check = rate_derivative(
      [&](double step) { return internal_smr_with_rate(cohort, hospital, hospital, stratum, rate + step); },
      rate, options.fd_step);
  report.diagnostics = {{"smr", state.smr},
                        {"threshold", n_k / cell.count},
                        {"direct_effect", direct},
                        {"indirect_effect", value - direct},
                        {"standard_derivative", cell.count / n_k}};
  return report;
}

SensitivityReport dsmr_uniform_actual_internal(const Cohort& cohort, const HospitalId& hospital,
                                               double dp, const AnalysisOptions& options) {
  const auto state = internal_state(cohort, hospital);
  const auto& table = *state.table;

  double concentration = 0.0;
  double room_down = 1.0;
  double room_up = 1.0;
  for (const auto& [stratum, cell] : table.cells()) {
    if (cell.count <= 0.0) continue;
    concentration += (cell.count / state.patients) * (cell.count / cohort.stratum_count(stratum));
    room_down = std::min(room_down, *cell.rate);
    room_up = std::min(room_up, 1.0 - *cell.rate);
  }
  const double factor = 1.0 - state.smr * concentration;
  const double threshold = 1.0 / concentration;
  auto report = make_report("dsmr_uniform_actual_internal",
                            dp / (state.expected / state.patients) * factor, options);
  if (dp == 0.0) {
    report.condition = "dp = 0";
  } else {
    report.condition = pick(classify(factor, options.zero_tolerance),
                            "SMR < 1/sum_s (n_hs/n_h)(n_hs/n_s)", "SMR = 1/sum_s (n_hs/n_h)(n_hs/n_s)",
                            "SMR > 1/sum_s (n_hs/n_h)(n_hs/n_s)");
  }
  report.check_kind = CheckKind::central_difference;
  auto slope = derivative(
      [&](double step) {
        auto cells = table.cells();
        for (auto& [stratum, cell] : cells) {
          if (cell.count > 0.0) *cell.rate += step;
        }
        return smr_internal(cohort.with_table(StratumTable(hospital, std::move(cells))), hospital).smr;
      },
      room_down, room_up, options.fd_step);
  if (slope) report.fd_check = *slope * dp;
  report.diagnostics = {{"smr", state.smr},
                        {"threshold", threshold},
                        {"concentration", concentration},
                        {"dampening_factor", factor},
                        {"dp", dp}};
  return report;
}

SensitivityReport dsmr_expected_internal(const Cohort& cohort, const HospitalId& hospital,
                                         const StratumId& stratum, double dpe,
                                         const AnalysisOptions& options) {
  const auto state = internal_state(cohort, hospital);
  const auto& table = *state.table;
  const double n_hk = table.count(stratum);
  const double n_k = cohort.stratum_count(stratum);
  const double expected_rate = state.expected / state.patients;

  auto report = make_report("dsmr_expected_internal",
                            -state.smr * (n_hk / state.patients) / expected_rate * dpe, options);
  report.condition = pick(report.sign, "dpe < 0 and n_hk > 0", "dpe = 0 or n_hk = 0",
                          "dpe > 0 and n_hk > 0");
  report.notes.push_back("share factor: n_hk/n_h");
  report.diagnostics = {{"smr", state.smr}, {"dpe", dpe}};
  if (n_k > 0.0) {
    report.diagnostics["value_n_hk_over_n_k"] = -state.smr * (n_hk / n_k) / expected_rate * dpe;
  }
  if (n_hk == 0.0) {
    report.fd_check = 0.0;
    return report;
  }

  report.check_kind = CheckKind::central_difference;
  const double base = state.standard.at(stratum);
  auto slope = rate_derivative(
      [&](double step) {
        auto standard = state.standard;
        standard[stratum] = base + step;
        return state.actual / expected_deaths(table, standard);
      },
      base, options.fd_step);
  if (slope) report.fd_check = *slope * dpe;
  return report;
}

SensitivityReport me_cross_hospital_internal(const Cohort& cohort, const HospitalId& hospital,
                                             const HospitalId& other, const StratumId& stratum,
                                             const AnalysisOptions& options) {
  if (hospital == other) {
    throw Error(ErrorKind::SameHospital, "cross-hospital effect needs two distinct hospitals");
  }
  const auto state = internal_state(cohort, hospital);
  const auto& other_table = cohort.at(other);
  const double n_hk = state.table->count(stratum);
  const double n_ik = other_table.count(stratum);
  const double n_k = cohort.stratum_count(stratum);
  const double standard_derivative = n_k > 0.0 ? n_ik / n_k : 0.0;
  const double expected_rate = state.expected / state.patients;

  auto report = make_report("me_cross_hospital_internal",
                            -state.smr * (n_hk / state.patients) / expected_rate * standard_derivative,
                            options);
  report.condition = pick(report.sign, "SMR < 0", "n_ik = 0 or n_hk = 0 or SMR = 0",
                          "n_ik > 0 and n_hk > 0");
  report.diagnostics = {{"smr", state.smr}, {"standard_derivative", standard_derivative}};
  if (n_ik == 0.0) {
    report.fd_check = 0.0;
    return report;
  }
  report.check_kind = CheckKind::central_difference;
  const double rate = *other_table.at(stratum).rate;
  report.fd_check = rate_derivative(
      [&](double step) { return internal_smr_with_rate(cohort, other, hospital, stratum, rate + step); },
      rate, options.fd_step);
  return report;
}

double standard_shift_add_patients(const Cohort& cohort, const HospitalId& hospital,
                                   const StratumId& stratum, double eta) {
  if (!std::isfinite(eta) || !(eta > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "number of added patients must be > 0");
  }
  const double rate = defined_rate(cohort.at(hospital), stratum);
  const double n_k = cohort.stratum_count(stratum);
  if (!(n_k > 0.0)) {
    throw Error(ErrorKind::EmptyStratum, "stratum '" + stratum.str() + "' has no patients in the cohort");
  }
  const double mean = internal_standard(cohort).at(stratum);
  return (rate - mean) / (1.0 + n_k / eta);
}

SensitivityReport add_patients_report(const Cohort& cohort, const HospitalId& hospital,
                                      const StratumId& stratum, double eta,
                                      const AnalysisOptions& options) {
  const double value = standard_shift_add_patients(cohort, hospital, stratum, eta);
  const auto& table = cohort.at(hospital);
  auto cell = table.at(stratum);
  const double before = internal_standard(cohort).at(stratum);
  cell.count += eta;
  const double after = internal_standard(cohort.with_table(table.with_cell(stratum, cell))).at(stratum);

  auto report = make_report("standard_shift_add_patients", value, options);
  report.condition = pick(report.sign, "p_ik > pbar_k", "p_ik = pbar_k", "p_ik < pbar_k");
  report.fd_check = after - before;
  report.diagnostics = {{"standard_rate", before}, {"standard_rate_after", after}, {"eta", eta}};
  return report;
}

}  // namespace smr
