#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smr/core.hpp"

namespace smr {

enum class Direction { increase, zero, decrease };

const char* to_string(Direction direction) noexcept;

/// Classifies with |value| <= zero_tolerance mapped to zero.
Direction classify(double value, double zero_tolerance = 1e-12) noexcept;

enum class CheckKind {
  direct_recompute,    // exact identity; agreement within `exact`
  central_difference,  // derivative; relative agreement within 1e-5
};

struct StratumEffect {
  StratumId stratum;
  double value = 0.0;
  Direction direction = Direction::zero;
  std::string condition;
};

/// Closed-form value of one perturbation together with its sign, the branch
/// of the sign condition that applies, and an independent reference value.
struct SensitivityReport {
  std::string analysis;
  double value = 0.0;
  Direction sign = Direction::zero;
  std::string condition;
  std::optional<double> fd_check;
  CheckKind check_kind = CheckKind::direct_recompute;
  std::map<std::string, double> diagnostics;
  std::vector<StratumEffect> strata;
  std::vector<std::string> notes;
  bool degenerate = false;
};

struct AnalysisOptions {
  double zero_tolerance = 1e-12;
  double fd_step = 1e-6;
  /// Reject non-integer patient shifts.
  bool integer_shifts = false;
};

/// True when the closed form and its reference agree under the report's
/// check kind: |v - ref| <= exact for recomputations, and
/// |v - ref| <= 1e-5 * max(|v|, 1e-3) for finite differences.
bool fd_agrees(const SensitivityReport& report, double exact = 1e-12);

/// Move `eta` patients from stratum `from` (l) to stratum `to` (k).
struct CaseMixShift {
  StratumId from;
  StratumId to;
  double eta = 0.0;
};

struct ScaleChange {
  double lambda = 1.0;
};

// Case mix ------------------------------------------------------------------

/// Counts move from l to k; rates and the total stay fixed. eta = 0 is the
/// identity. Throws ShiftExceedsStratum, UnknownStratum, SameStratum, and
/// UndefinedRate when the receiving stratum has no rate.
StratumTable shift_case_mix(const StratumTable& table, const CaseMixShift& shift,
                            const AnalysisOptions& options = {});

/// Ω^ext: SMR change caused by the shift, in closed form; fd_check is the
/// direct difference of the two SMRs.
SensitivityReport omega_external(const StratumTable& table, const ExternalStandard& standard,
                                 const CaseMixShift& shift, const AnalysisOptions& options = {});

/// p_hk / p_k^e for a hospital whose patients all sit in stratum k.
/// Throws NotConcentrated when any other stratum is populated.
double concentrated_smr_external(const StratumTable& table, const ExternalStandard& standard,
                                 const StratumId& stratum);

// Scale ---------------------------------------------------------------------

StratumTable scale_hospital(const StratumTable& table, const ScaleChange& scale);

SensitivityReport scale_invariance_external(const StratumTable& table,
                                            const ExternalStandard& standard,
                                            const ScaleChange& scale,
                                            const AnalysisOptions& options = {});

// Rates under an external standard ------------------------------------------

SensitivityReport me_actual_external(const StratumTable& table, const ExternalStandard& standard,
                                     const StratumId& stratum,
                                     const AnalysisOptions& options = {});

SensitivityReport dsmr_uniform_actual_external(const StratumTable& table,
                                               const ExternalStandard& standard, double dp,
                                               const AnalysisOptions& options = {});

SensitivityReport me_expected_external(const StratumTable& table,
                                       const ExternalStandard& standard,
                                       const StratumId& stratum,
                                       const AnalysisOptions& options = {});

SensitivityReport dsmr_uniform_expected_external(const StratumTable& table,
                                                 const ExternalStandard& standard, double dp,
                                                 const AnalysisOptions& options = {});

// Internal standardization --------------------------------------------------

/// Ω^int with the α-weighted threshold rates. The diagnostics expose
/// alpha_hk, alpha_hl, threshold_rate_k and threshold_rate_l.
SensitivityReport omega_internal(const Cohort& cohort, const HospitalId& hospital,
                                 const CaseMixShift& shift, const AnalysisOptions& options = {});

/// ΔSMR^int from scaling one hospital by λ inside the cohort. Per-stratum
/// entries give p_s^e(n_hs) - p_s^e(λn_hs) and how p_hs compares with p̄_s.
SensitivityReport delta_smr_scale_internal(const Cohort& cohort, const HospitalId& hospital,
                                           const ScaleChange& scale,
                                           const AnalysisOptions& options = {});

/// Direct evaluation of SMR^int after scaling `hospital` by λ in the cohort.
double smr_internal_scaled(const Cohort& cohort, const HospitalId& hospital, double lambda);

/// Limit of SMR^int as the hospital's scale grows without bound: exactly 1.
/// Throws ZeroActualRate when the hospital has no deaths at all.
double smr_internal_scale_limit(const Cohort& cohort, const HospitalId& hospital);

SensitivityReport me_actual_internal(const Cohort& cohort, const HospitalId& hospital,
                                     const StratumId& stratum,
                                     const AnalysisOptions& options = {});

/// Uses the inner denominator n_s (cohort total of each summed stratum).
SensitivityReport dsmr_uniform_actual_internal(const Cohort& cohort, const HospitalId& hospital,
                                               double dp, const AnalysisOptions& options = {});

/// Change in SMR^int when the internal expected rate of stratum k moves by
/// dpe, holding the hospital's own rates fixed. Uses the share n_hk/n_h; the
/// variant with n_hk/n_k is reported as diagnostic "value_n_hk_over_n_k".
SensitivityReport dsmr_expected_internal(const Cohort& cohort, const HospitalId& hospital,
                                         const StratumId& stratum, double dpe,
                                         const AnalysisOptions& options = {});

/// ∂SMR_h/∂p_ik for another hospital i: (∂p_k^e/∂p_ik = n_ik/n_k) chained
/// with the expected-rate effect on h. Throws SameHospital when i == h.
SensitivityReport me_cross_hospital_internal(const Cohort& cohort, const HospitalId& hospital,
                                             const HospitalId& other, const StratumId& stratum,
                                             const AnalysisOptions& options = {});

/// p_k^e(n_ik + η) - p_k^e(n_ik) = (p_ik - p̄_k) / (1 + n_k/η).
double standard_shift_add_patients(const Cohort& cohort, const HospitalId& hospital,
                                   const StratumId& stratum, double eta);

/// Report form of the above, checked against rebuilding the standard.
SensitivityReport add_patients_report(const Cohort& cohort, const HospitalId& hospital,
                                      const StratumId& stratum, double eta,
                                      const AnalysisOptions& options = {});

}  // namespace smr
