#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smr/types.hpp"

namespace smr {

enum class Axiom {
  strict_monotonicity,
  case_mix_insensitivity,
  scale_insensitivity,
  equivalence,
  dominance,
};

inline constexpr std::array<Axiom, 5> kAllAxioms = {
    Axiom::strict_monotonicity, Axiom::case_mix_insensitivity, Axiom::scale_insensitivity,
    Axiom::equivalence, Axiom::dominance,
};

std::string_view to_string(Axiom axiom) noexcept;
Axiom parse_axiom(std::string_view text);

/// A measure maps (scenario, hospital) to a value; lower is better.
/// External-scheme measures are only evaluated on probes that carry a
/// standard; internal-scheme measures skip probes marked external_only.
struct MeasureUnderTest {
  std::string name;
  Scheme scheme = Scheme::external;
  std::function<double(const Scenario&, const HospitalId&)> evaluate;
};

MeasureUnderTest smr_external_measure();
MeasureUnderTest smr_internal_measure();
/// Raw actual mortality rate of the hospital.
MeasureUnderTest actual_rate_measure();
/// Always 1.
MeasureUnderTest constant_measure();

/// One comparison.
///   strict_monotonicity:     subject's value must rise from before to after
///   case_mix / scale:        subject's value must not move
///   equivalence:             subject and other must agree on `before`
///   dominance:               subject (dominant) must rank strictly better than other
struct Probe {
  std::string label;
  Axiom axiom = Axiom::strict_monotonicity;
  Scenario before;
  std::optional<Scenario> after;
  HospitalId subject;
  std::optional<HospitalId> other;
  bool external_only = false;
  /// Rates for empty strata, used only to establish dominance comparability.
  std::map<HospitalId, std::map<StratumId, double>> supplied_rates;

  friend bool operator==(const Probe&, const Probe&) = default;
};

/// Throws InvalidInput when the probe does not express its axiom's premise,
/// IncomparableProbe when a dominance premise cannot be checked.
void validate_probe(const Probe& probe);

struct Witness {
  Probe probe;
  double first_value = 0.0;
  double second_value = 0.0;

  friend bool operator==(const Witness&, const Witness&) = default;
};

enum class Status { holds, violated };

const char* to_string(Status status) noexcept;

struct AxiomVerdict {
  Axiom axiom = Axiom::strict_monotonicity;
  Status status = Status::holds;
  std::optional<Witness> witness;
  std::size_t trials = 0;
  std::size_t skipped = 0;
};

struct AuditOptions {
  std::size_t random_trials = 10000;
  double insensitivity_tolerance = 1e-12;
  double equivalence_tolerance = 1e-9;
};

/// True when (first, second) violate the axiom.
bool is_violation(Axiom axiom, double first, double second, const AuditOptions& options = {});

/// Evaluates the two values compared for this probe.
std::pair<double, double> evaluate_probe(const MeasureUnderTest& measure, const Probe& probe);

bool applicable(const MeasureUnderTest& measure, const Probe& probe) noexcept;

/// Runs every applicable probe; the witness is the violating probe with the
/// lowest index. Throws EmptyProbeSet when no probe applies.
AxiomVerdict check_axiom(const MeasureUnderTest& measure, Axiom axiom,
                         const std::vector<Probe>& probes, const AuditOptions& options = {});

AxiomVerdict check_strict_monotonicity(const MeasureUnderTest& measure,
                                       const std::vector<Probe>& probes,
                                       const AuditOptions& options = {});
AxiomVerdict check_case_mix_insensitivity(const MeasureUnderTest& measure,
                                          const std::vector<Probe>& probes,
                                          const AuditOptions& options = {});
AxiomVerdict check_scale_insensitivity(const MeasureUnderTest& measure,
                                       const std::vector<Probe>& probes,
                                       const AuditOptions& options = {});
AxiomVerdict check_equivalence(const MeasureUnderTest& measure, const std::vector<Probe>& probes,
                               const AuditOptions& options = {});
AxiomVerdict check_dominance(const MeasureUnderTest& measure, const std::vector<Probe>& probes,
                             const AuditOptions& options = {});

/// Fixed probes built from the named scenarios.
std::vector<Probe> scenario_probes(Axiom axiom);

/// Seeded random probes; identical (axiom, seed, count) gives identical probes.
std::vector<Probe> random_probes(Axiom axiom, std::uint64_t seed, std::size_t count);

/// scenario_probes followed by random_probes.
std::vector<Probe> probe_set(Axiom axiom, std::uint64_t seed, std::size_t count);

/// Re-evaluates the witness: true when the recorded values are reproduced
/// exactly and still violate the axiom.
bool replay_witness(const MeasureUnderTest& measure, const Witness& witness,
                    const AuditOptions& options = {});

struct AuditRow {
  std::string measure;
  Scheme scheme = Scheme::external;
  std::array<AxiomVerdict, 5> verdicts;
};

struct AuditMatrix {
  std::vector<AuditRow> rows;
  std::uint64_t seed = 0;
  std::size_t random_trials = 0;
};

/// Built-in SMR measures first, then `extra`.
AuditMatrix run_audit(const std::vector<MeasureUnderTest>& extra, std::uint64_t seed,
                      const AuditOptions& options = {});

/// external: holds, violated, holds, violated, violated; internal: all violated.
std::array<Status, 5> reference_row(Scheme scheme) noexcept;

/// Compares the rows named "smr-external" and "smr-internal".
bool matches_reference(const AuditMatrix& matrix);

}  // namespace smr
