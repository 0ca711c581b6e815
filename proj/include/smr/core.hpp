#pragma once

#include <map>
#include <vector>

#include "smr/error.hpp"
#include "smr/types.hpp"

namespace smr {

using InternalStandard = std::map<StratumId, double>;

/// Σ_s n_hs·p_hs over populated strata.
double actual_deaths(const StratumTable& table);

/// Σ_s n_hs·p_s^e over populated strata. Throws MissingStandardRate when a
/// populated stratum has no entry in `rates`.
double expected_deaths(const StratumTable& table, const std::map<StratumId, double>& rates);

/// p̄_h, the patient-weighted mean of the hospital's stratum rates.
/// Throws EmptyHospital when the hospital has no patients.
double actual_rate(const StratumTable& table);

/// p̄_h^{e,ext}: the standard's rates averaged over the hospital's case mix.
double expected_rate_external(const StratumTable& table, const ExternalStandard& standard);

/// SMR under an external standard. Throws ZeroExpectedRate when the
/// hospital's expected rate is zero.
SmrResult smr_external(const StratumTable& table, const ExternalStandard& standard);

/// p_s^{e,int}: the patient-weighted average rate of each stratum across the
/// cohort. Strata nobody treats are omitted. Hospitals are visited in id
/// order so the result does not depend on cohort ordering.
InternalStandard internal_standard(const Cohort& cohort);

double expected_rate_internal(const Cohort& cohort, const HospitalId& hospital);

/// SMR of one cohort member against the cohort's own standard.
SmrResult smr_internal(const Cohort& cohort, const HospitalId& hospital);

/// All members, in cohort order, sharing one standard computation.
std::vector<SmrResult> smr_internal_all(const Cohort& cohort);

/// Shared ratio helper: throws ZeroExpectedRate on a zero denominator.
SmrResult make_result(const StratumTable& table, double expected_deaths, Scheme scheme);

}  // namespace smr
