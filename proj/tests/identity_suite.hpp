#pragma once

#include <sstream>
#include <string>

#include "smr/sensitivity.hpp"
#include "support.hpp"

namespace smr::test {

struct IdentityStats {
  std::size_t configs = 0;
  std::size_t exact_checks = 0;
  std::size_t derivative_checks = 0;
  std::size_t failures = 0;
  double worst_exact = 0.0;
  double worst_relative = 0.0;
  std::string first_failure;
};

/// Every closed form against its recomputation (exact kinds, 1e-12) or
/// central difference (relative 1e-5) on `configs` random configurations.
inline IdentityStats run_identity_suite(std::uint64_t seed, std::size_t configs) {
  Generator gen(seed);
  IdentityStats stats;
  auto record = [&](const SensitivityReport& r, std::size_t config) {
    const double diff = r.fd_check ? std::abs(r.value - *r.fd_check) : 0.0;
    if (r.check_kind == CheckKind::direct_recompute) {
      ++stats.exact_checks;
      stats.worst_exact = std::max(stats.worst_exact, diff);
    } else {
      ++stats.derivative_checks;
      stats.worst_relative = std::max(stats.worst_relative, diff / std::max(std::abs(r.value), 1e-3));
    }
    if (!r.fd_check || !fd_agrees(r)) {
      ++stats.failures;
      if (stats.first_failure.empty()) {
        std::ostringstream out;
        out.precision(17);
        out << r.analysis << " config " << config << ": value " << r.value << " check "
            << (r.fd_check ? *r.fd_check : std::nan(""));
        stats.first_failure = out.str();
      }
    }
  };

  for (std::size_t c = 0; c < configs; ++c) {
    const auto config = gen.config();
    const auto& cohort = config.cohort;
    const auto& pe = config.standard;
    const auto& h = cohort.hospitals()[gen.index(cohort.size())];
    const auto strata = populated(h);
    const std::size_t li = gen.index(strata.size());
    std::size_t ki = gen.index(strata.size() - 1);
    if (ki >= li) ++ki;
    const StratumId& l = strata[li];
    const StratumId& k = strata[ki];
    const CaseMixShift shift{l, k, gen.uniform(0.05, 0.95) * h.count(l)};
    const double lambda = gen.log_uniform(0.1, 10.0);
    const double dp = gen.uniform(-0.01, 0.01);

    record(omega_external(h, pe, shift), c);
    record(scale_invariance_external(h, pe, {lambda}), c);
    record(me_actual_external(h, pe, k), c);
    record(me_expected_external(h, pe, k), c);
    record(dsmr_uniform_actual_external(h, pe, dp), c);
    record(dsmr_uniform_expected_external(h, pe, dp), c);

    record(omega_internal(cohort, h.hospital(), shift), c);
    record(delta_smr_scale_internal(cohort, h.hospital(), {lambda}), c);
    record(me_actual_internal(cohort, h.hospital(), k), c);
    record(dsmr_uniform_actual_internal(cohort, h.hospital(), dp), c);
    record(dsmr_expected_internal(cohort, h.hospital(), k, dp), c);

    const auto* other = &cohort.hospitals()[gen.index(cohort.size())];
    if (other->hospital() == h.hospital()) other = &cohort.hospitals()[(other - cohort.hospitals().data() + 1) % cohort.size()];
    const auto other_strata = populated(*other);
    const auto& stratum = other_strata[gen.index(other_strata.size())];
    record(me_cross_hospital_internal(cohort, h.hospital(), other->hospital(), stratum), c);
    record(add_patients_report(cohort, h.hospital(), k, gen.log_uniform(0.5, 500.0)), c);
    ++stats.configs;
  }
  return stats;
}

}  // namespace smr::test
