#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace smr {

template <class Tag>
class Identifier {
 public:
  Identifier() = default;
  explicit Identifier(std::string value) : value_(std::move(value)) {}
  explicit Identifier(const char* value) : value_(value) {}

  const std::string& str() const noexcept { return value_; }

  friend bool operator==(const Identifier&, const Identifier&) = default;
  friend auto operator<=>(const Identifier&, const Identifier&) = default;

 private:
  std::string value_;
};

struct StratumTag {};
struct HospitalTag {};

using StratumId = Identifier<StratumTag>;
using HospitalId = Identifier<HospitalTag>;

enum class Scheme { external, internal };

const char* to_string(Scheme scheme) noexcept;

/// Comparison tolerances. `exact` applies where the quantities are algebraic
/// identities, `derived` where they pass through further arithmetic.
struct Tolerances {
  double exact = 1e-12;
  double derived = 1e-9;
};

/// Patients of one stratum in one hospital. The rate may be absent only when
/// the stratum is empty; a rate on an empty stratum never enters a sum.
struct StratumCell {
  double count = 0.0;
  std::optional<double> rate;

  friend bool operator==(const StratumCell&, const StratumCell&) = default;
};

/// Per-hospital stratum rows (n_hs, p_hs).
class StratumTable {
 public:
  StratumTable() = default;
  /// Throws Error(InvalidInput) on negative or non-finite counts, rates outside
  /// [0,1], or a populated stratum without a rate.
  StratumTable(HospitalId hospital, std::map<StratumId, StratumCell> cells);

  const HospitalId& hospital() const noexcept { return hospital_; }
  const std::map<StratumId, StratumCell>& cells() const noexcept { return cells_; }

  const StratumCell* find(const StratumId& stratum) const;
  /// Throws Error(UnknownStratum).
  const StratumCell& at(const StratumId& stratum) const;
  /// Zero for strata not listed.
  double count(const StratumId& stratum) const;
  double total_count() const;

  StratumTable with_cell(const StratumId& stratum, StratumCell cell) const;
  StratumTable with_hospital(HospitalId hospital) const;

  friend bool operator==(const StratumTable&, const StratumTable&) = default;

 private:
  HospitalId hospital_;
  std::map<StratumId, StratumCell> cells_;
};

/// Externally derived expected rates p_s^{e,ext}.
class ExternalStandard {
 public:
  ExternalStandard() = default;
  explicit ExternalStandard(std::map<StratumId, double> rates);

  const std::map<StratumId, double>& rates() const noexcept { return rates_; }
  std::optional<double> rate(const StratumId& stratum) const;
  ExternalStandard with_rate(const StratumId& stratum, double rate) const;

  friend bool operator==(const ExternalStandard&, const ExternalStandard&) = default;

 private:
  std::map<StratumId, double> rates_;
};

/// The hospitals that jointly define the internal standard.
class Cohort {
 public:
  Cohort() = default;
  /// Throws Error(InvalidInput) on duplicate hospital ids.
  explicit Cohort(std::vector<StratumTable> hospitals);

  const std::vector<StratumTable>& hospitals() const noexcept { return hospitals_; }
  std::size_t size() const noexcept { return hospitals_.size(); }

  const StratumTable* find(const HospitalId& hospital) const;
  /// Throws Error(UnknownHospital).
  const StratumTable& at(const HospitalId& hospital) const;

  /// Replaces the table carrying the same hospital id.
  Cohort with_table(StratumTable table) const;

  /// n_s: cohort-wide patients in a stratum.
  double stratum_count(const StratumId& stratum) const;

  friend bool operator==(const Cohort&, const Cohort&) = default;

 private:
  std::vector<StratumTable> hospitals_;
};

/// A cohort plus, optionally, an external standard. This is the unit the
/// audit probes and the built-in scenarios produce.
struct Scenario {
  Cohort cohort;
  std::optional<ExternalStandard> standard;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct SmrResult {
  HospitalId hospital;
  double actual_rate = 0.0;
  double expected_rate = 0.0;
  double smr = 0.0;
  Scheme scheme = Scheme::external;
};

}  // namespace smr
