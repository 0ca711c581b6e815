#include "smr/audit.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "smr/core.hpp"
#include "smr/error.hpp"
#include "smr/scenarios.hpp"
#include "smr/sensitivity.hpp"

namespace smr {

namespace {

bool populated(const StratumCell* cell) { return cell != nullptr && cell->count > 0.0; }

std::set<StratumId> populated_strata(const StratumTable& table) {
  std::set<StratumId> out;
  for (const auto& [stratum, cell] : table.cells()) {
    if (cell.count > 0.0) out.insert(stratum);
  }
  return out;
}

std::set<StratumId> populated_union(const StratumTable& a, const StratumTable& b) {
  auto out = populated_strata(a);
  out.merge(populated_strata(b));
  return out;
}

[[noreturn]] void bad_probe(const Probe& probe, const std::string& why) {
  throw Error(ErrorKind::InvalidInput, "probe '" + probe.label + "': " + why);
}

void require_after(const Probe& probe) {
  if (!probe.after) bad_probe(probe, "needs a perturbed scenario");
  if (!(probe.before.standard == probe.after->standard)) bad_probe(probe, "standard must stay fixed");
  const auto& before = probe.before.cohort.hospitals();
  const auto& after = probe.after->cohort.hospitals();
  if (before.size() != after.size()) bad_probe(probe, "cohort membership changed");
  for (const auto& table : before) {
    const auto* other = probe.after->cohort.find(table.hospital());
    if (other == nullptr) bad_probe(probe, "cohort membership changed");
    if (table.hospital() != probe.subject && !(table == *other)) {
      bad_probe(probe, "hospital '" + table.hospital().str() + "' changed but is not the subject");
    }
  }
  probe.before.cohort.at(probe.subject);
}

void require_rates_fixed(const Probe& probe, const StratumTable& before, const StratumTable& after) {
  for (const auto& [stratum, cell] : after.cells()) {
    if (cell.count <= 0.0) continue;
    const auto* old = before.find(stratum);
    if (old == nullptr || !old->rate || *old->rate != *cell.rate) {
      bad_probe(probe, "rate of stratum '" + stratum.str() + "' changed");
    }
  }
}

void validate_monotonicity(const Probe& probe) {
  require_after(probe);
  const auto& before = probe.before.cohort.at(probe.subject);
  const auto& after = probe.after->cohort.at(probe.subject);
  std::size_t changed = 0;
  for (const auto& [stratum, cell] : before.cells()) {
    const auto* next = after.find(stratum);
    if (next == nullptr || next->count != cell.count) bad_probe(probe, "counts must stay fixed");
    if (*next == cell) continue;
    ++changed;
    if (!(cell.count > 0.0)) bad_probe(probe, "perturbed stratum must be populated");
    if (!(*next->rate > *cell.rate)) bad_probe(probe, "rate must increase");
  }
  if (after.cells().size() != before.cells().size()) bad_probe(probe, "strata changed");
  if (changed != 1) bad_probe(probe, "exactly one stratum rate must change");
}

void validate_case_mix(const Probe& probe) {
  require_after(probe);
  const auto& before = probe.before.cohort.at(probe.subject);
  const auto& after = probe.after->cohort.at(probe.subject);
  const double n = before.total_count();
  if (std::abs(after.total_count() - n) > 1e-9 * std::max(1.0, n)) bad_probe(probe, "hospital size changed");
  require_rates_fixed(probe, before, after);
}

void validate_scale(const Probe& probe) {
  require_after(probe);
  const auto& before = probe.before.cohort.at(probe.subject);
  const auto& after = probe.after->cohort.at(probe.subject);
  const double n = before.total_count();
  if (!(n > 0.0)) bad_probe(probe, "subject has no patients");
  const double lambda = after.total_count() / n;
  if (!(lambda > 0.0)) bad_probe(probe, "scale must be positive");
  for (const auto& [stratum, cell] : before.cells()) {
    const double scaled = after.count(stratum);
    if (std::abs(scaled - lambda * cell.count) > 1e-12 * std::max(1.0, scaled)) {
      bad_probe(probe, "case mix changed");
    }
  }
  require_rates_fixed(probe, before, after);
}

void validate_equivalence(const Probe& probe) {
  if (!probe.other || *probe.other == probe.subject) bad_probe(probe, "needs two distinct hospitals");
  const auto& a = probe.before.cohort.at(probe.subject);
  const auto& b = probe.before.cohort.at(*probe.other);
  const auto strata = populated_union(a, b);

  bool same_rates = true;
  for (const auto& s : strata) {
    const auto* ca = a.find(s);
    const auto* cb = b.find(s);
    if (ca == nullptr || cb == nullptr || !ca->rate || !cb->rate || *ca->rate != *cb->rate) {
      same_rates = false;
      break;
    }
  }
  if (same_rates) return;

  if (!probe.before.standard) bad_probe(probe, "rates differ and no standard to compare deviations");
  const auto& standard = *probe.before.standard;
  for (const auto& s : strata) {
    const auto pe = standard.rate(s);
    if (!pe) bad_probe(probe, "no standard rate for stratum '" + s.str() + "'");
    const auto* ca = a.find(s);
    const auto* cb = b.find(s);
    if (populated(ca) && populated(cb)) {
      if (std::abs((*ca->rate - *pe) - (*cb->rate - *pe)) > 1e-12) {
        bad_probe(probe, "deviations differ on stratum '" + s.str() + "'");
      }
    } else {
      const auto* cell = populated(ca) ? ca : cb;
      if (std::abs(*cell->rate - *pe) > 1e-12) {
        bad_probe(probe, "one-sided stratum '" + s.str() + "' deviates from the standard");
      }
    }
  }
}

double comparable_rate(const Probe& probe, const StratumTable& table, const StratumId& stratum) {
  const auto* cell = table.find(stratum);
  if (populated(cell)) return *cell->rate;
  auto hospital = probe.supplied_rates.find(table.hospital());
  if (hospital != probe.supplied_rates.end()) {
    auto rate = hospital->second.find(stratum);
    if (rate != hospital->second.end()) return rate->second;
  }
  throw Error(ErrorKind::IncomparableProbe, "probe '" + probe.label + "': hospital '" +
                                                table.hospital().str() + "' has no patients in stratum '" +
                                                stratum.str() + "' and no rate was supplied");
}

void validate_dominance(const Probe& probe) {
  if (!probe.other || *probe.other == probe.subject) bad_probe(probe, "needs two distinct hospitals");
  const auto& dominant = probe.before.cohort.at(probe.subject);
  const auto& dominated = probe.before.cohort.at(*probe.other);
  bool strict = false;
  for (const auto& s : populated_union(dominant, dominated)) {
    const double lo = comparable_rate(probe, dominant, s);
    const double hi = comparable_rate(probe, dominated, s);
    if (lo > hi) bad_probe(probe, "subject is worse in stratum '" + s.str() + "'");
    strict = strict || lo < hi;
  }
  if (!strict) bad_probe(probe, "subject is nowhere strictly better");
}

// Random probes -------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi) {
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * uniform());
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

StratumId stratum_id(std::size_t s) { return StratumId(std::to_string(s + 1)); }
HospitalId hospital_id(std::size_t h) { return HospitalId("H" + std::to_string(h + 1)); }

std::vector<bool> draw_pattern(Rng& rng, std::size_t strata) {
  for (;;) {
    std::vector<bool> pattern(strata);
    std::size_t count = 0;
    for (std::size_t s = 0; s < strata; ++s) {
      pattern[s] = rng.uniform() < 0.75;
      count += pattern[s] ? 1 : 0;
    }
    if (count >= 2) return pattern;
  }
}

StratumTable draw_table(Rng& rng, const HospitalId& id, const std::vector<bool>& pattern,
                        const std::vector<double>* rates = nullptr, bool rate_on_empty = false) {
  std::map<StratumId, StratumCell> cells;
  for (std::size_t s = 0; s < pattern.size(); ++s) {
    if (pattern[s]) {
      const double count = rng.log_uniform(1.0, 1000.0);
      const double rate = rates ? (*rates)[s] : rng.uniform(0.01, 0.5);
      cells.emplace(stratum_id(s), StratumCell{count, rate});
    } else {
      std::optional<double> rate;
      if (rates && rate_on_empty) rate = (*rates)[s];
      cells.emplace(stratum_id(s), StratumCell{0.0, rate});
    }
  }
  return StratumTable(id, std::move(cells));
}

struct Draw {
  Scenario scenario;
  std::size_t strata = 0;
  std::size_t hospitals = 0;
};

Draw draw_scenario(Rng& rng) {
  Draw draw;
  draw.strata = 2 + rng.index(5);
  draw.hospitals = 2 + rng.index(3);
  std::vector<StratumTable> tables;
  for (std::size_t h = 0; h < draw.hospitals; ++h) {
    tables.push_back(draw_table(rng, hospital_id(h), draw_pattern(rng, draw.strata)));
  }
  std::map<StratumId, double> standard;
  for (std::size_t s = 0; s < draw.strata; ++s) standard.emplace(stratum_id(s), rng.uniform(0.01, 0.5));
  draw.scenario = Scenario{Cohort(std::move(tables)), ExternalStandard(std::move(standard))};
  return draw;
}

std::pair<std::size_t, std::size_t> draw_pair(Rng& rng, std::size_t n) {
  const std::size_t a = rng.index(n);
  std::size_t b = rng.index(n - 1);
  if (b >= a) ++b;
  return {a, b};
}

Probe random_probe(Axiom axiom, Rng& rng, std::size_t index) {
  auto draw = draw_scenario(rng);
  Probe probe;
  probe.label = "random #" + std::to_string(index);
  probe.axiom = axiom;
  auto& cohort = draw.scenario.cohort;

  switch (axiom) {
    case Axiom::strict_monotonicity: {
      probe.subject = hospital_id(rng.index(draw.hospitals));
      const auto& table = cohort.at(probe.subject);
      const auto strata = populated_strata(table);
      auto it = strata.begin();
      std::advance(it, static_cast<long>(rng.index(strata.size())));
      const auto cell = table.at(*it);
      const double delta = rng.uniform(0.001, 0.05);
      probe.after = draw.scenario;
      probe.after->cohort = cohort.with_table(table.with_cell(*it, StratumCell{cell.count, *cell.rate + delta}));
      break;
    }
    case Axiom::case_mix_insensitivity: {
      probe.subject = hospital_id(rng.index(draw.hospitals));
      const auto& table = cohort.at(probe.subject);
      const auto on = populated_strata(table);
      const std::vector<StratumId> strata(on.begin(), on.end());
      const auto [l, k] = draw_pair(rng, strata.size());
      const double eta = rng.uniform(0.05, 1.0) * table.count(strata[l]);
      probe.after = draw.scenario;
      probe.after->cohort = cohort.with_table(shift_case_mix(table, CaseMixShift{strata[l], strata[k], eta}));
      break;
    }
    case Axiom::scale_insensitivity: {
      probe.subject = hospital_id(rng.index(draw.hospitals));
      const double lambda = rng.log_uniform(0.1, 10.0);
      probe.after = draw.scenario;
      probe.after->cohort = cohort.with_table(scale_hospital(cohort.at(probe.subject), ScaleChange{lambda}));
      break;
    }
    case Axiom::equivalence: {
      const auto [a, b] = draw_pair(rng, draw.hospitals);
      probe.subject = hospital_id(a);
      probe.other = hospital_id(b);
      std::vector<double> rates(draw.strata);
      for (auto& r : rates) r = rng.uniform(0.01, 0.5);
      const auto pattern_a = draw_pattern(rng, draw.strata);
      const auto pattern_b = draw_pattern(rng, draw.strata);
      const bool deviations = index % 2 == 1;
      if (deviations) {
        probe.external_only = true;
        for (std::size_t s = 0; s < draw.strata; ++s) {
          if (pattern_a[s] != pattern_b[s]) rates[s] = *draw.scenario.standard->rate(stratum_id(s));
        }
      }
      cohort = cohort.with_table(draw_table(rng, probe.subject, pattern_a, &rates, !deviations))
                   .with_table(draw_table(rng, *probe.other, pattern_b, &rates, !deviations));
      break;
    }
    case Axiom::dominance: {
      const auto [a, b] = draw_pair(rng, draw.hospitals);
      probe.subject = hospital_id(a);
      probe.other = hospital_id(b);
      const auto pattern = draw_pattern(rng, draw.strata);
      std::vector<double> worse(draw.strata);
      std::vector<double> better(draw.strata);
      std::vector<std::size_t> on;
      for (std::size_t s = 0; s < draw.strata; ++s) {
        worse[s] = rng.uniform(0.01, 0.5);
        better[s] = std::max(0.0, worse[s] - rng.uniform(0.0, 0.05));
        if (pattern[s]) on.push_back(s);
      }
      const std::size_t strict = on[rng.index(on.size())];
      better[strict] = std::max(0.0, worse[strict] - rng.uniform(0.001, 0.05));
      cohort = cohort.with_table(draw_table(rng, probe.subject, pattern, &better))
                   .with_table(draw_table(rng, *probe.other, pattern, &worse));
      break;
    }
  }
  probe.before = draw.scenario;
  if (probe.after) probe.after->standard = probe.before.standard;
  return probe;
}

// Scenario probes ----------------------------------------------------------------

ScenarioSpec spec_of(ScenarioName name, std::optional<double> w11 = std::nullopt) {
  auto spec = default_spec(name);
  if (w11) spec.overrides["w11"] = *w11;
  return spec;
}

/// Before at `from`; after changes only the subject's table to its value at `to`.
Probe subject_change(std::string label, Axiom axiom, const ScenarioSpec& spec, double from, double to,
                     const char* subject, bool external_only) {
  Probe probe;
  probe.label = std::move(label);
  probe.axiom = axiom;
  probe.subject = HospitalId(subject);
  probe.before = build_scenario(spec, from);
  const auto target = build_scenario(spec, to);
  probe.after = probe.before;
  probe.after->cohort = probe.before.cohort.with_table(target.cohort.at(probe.subject));
  probe.external_only = external_only;
  return probe;
}

Probe comparison(std::string label, Axiom axiom, const ScenarioSpec& spec, double at, const char* subject,
                 const char* other, bool external_only) {
  Probe probe;
  probe.label = std::move(label);
  probe.axiom = axiom;
  probe.before = build_scenario(spec, at);
  probe.subject = HospitalId(subject);
  probe.other = HospitalId(other);
  probe.external_only = external_only;
  return probe;
}

std::string num(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%g", value);
  return buffer;
}

}  // namespace

std::string_view to_string(Axiom axiom) noexcept {
  switch (axiom) {
    case Axiom::strict_monotonicity: return "strict_monotonicity";
    case Axiom::case_mix_insensitivity: return "case_mix_insensitivity";
    case Axiom::scale_insensitivity: return "scale_insensitivity";
    case Axiom::equivalence: return "equivalence";
    case Axiom::dominance: return "dominance";
  }
  return "?";
}

Axiom parse_axiom(std::string_view text) {
  for (auto axiom : kAllAxioms) {
    if (to_string(axiom) == text) return axiom;
  }
  throw Error(ErrorKind::InvalidInput, "unknown axiom '" + std::string(text) + "'");
}

const char* to_string(Status status) noexcept { return status == Status::holds ? "holds" : "violated"; }

MeasureUnderTest smr_external_measure() {
  return {"smr-external", Scheme::external, [](const Scenario& s, const HospitalId& h) {
            return smr_external(s.cohort.at(h), *s.standard).smr;
          }};
}

MeasureUnderTest smr_internal_measure() {
  return {"smr-internal", Scheme::internal,
          [](const Scenario& s, const HospitalId& h) { return smr_internal(s.cohort, h).smr; }};
}

MeasureUnderTest actual_rate_measure() {
  return {"actual-rate", Scheme::external,
          [](const Scenario& s, const HospitalId& h) { return actual_rate(s.cohort.at(h)); }};
}

MeasureUnderTest constant_measure() {
  return {"constant", Scheme::external, [](const Scenario&, const HospitalId&) { return 1.0; }};
}

void validate_probe(const Probe& probe) {
  switch (probe.axiom) {
    case Axiom::strict_monotonicity: validate_monotonicity(probe); break;
    case Axiom::case_mix_insensitivity: validate_case_mix(probe); break;
    case Axiom::scale_insensitivity: validate_scale(probe); break;
    case Axiom::equivalence: validate_equivalence(probe); break;
    case Axiom::dominance: validate_dominance(probe); break;
  }
}

bool is_violation(Axiom axiom, double first, double second, const AuditOptions& options) {
  switch (axiom) {
    case Axiom::strict_monotonicity: return !(second > first);
    case Axiom::case_mix_insensitivity:
    case Axiom::scale_insensitivity: return !(std::abs(second - first) <= options.insensitivity_tolerance);
    case Axiom::equivalence: return !(std::abs(second - first) <= options.equivalence_tolerance);
    case Axiom::dominance: return !(first < second);
  }
  return true;
}

std::pair<double, double> evaluate_probe(const MeasureUnderTest& measure, const Probe& probe) {
  const double first = measure.evaluate(probe.before, probe.subject);
  switch (probe.axiom) {
    case Axiom::equivalence:
    case Axiom::dominance: return {first, measure.evaluate(probe.before, *probe.other)};
    default: return {first, measure.evaluate(*probe.after, probe.subject)};
  }
}

bool applicable(const MeasureUnderTest& measure, const Probe& probe) noexcept {
  if (measure.scheme == Scheme::external) return probe.before.standard.has_value();
  return !probe.external_only;
}

AxiomVerdict check_axiom(const MeasureUnderTest& measure, Axiom axiom, const std::vector<Probe>& probes,
                         const AuditOptions& options) {
  if (probes.empty()) throw Error(ErrorKind::EmptyProbeSet, std::string(to_string(axiom)) + ": no probes");
  AxiomVerdict verdict;
  verdict.axiom = axiom;
  for (const auto& probe : probes) {
    if (probe.axiom != axiom) {
      throw Error(ErrorKind::InvalidInput, "probe '" + probe.label + "' targets " +
                                               std::string(to_string(probe.axiom)));
    }
    validate_probe(probe);
    if (!applicable(measure, probe)) {
      ++verdict.skipped;
      continue;
    }
    ++verdict.trials;
    const auto [first, second] = evaluate_probe(measure, probe);
    if (!verdict.witness && is_violation(axiom, first, second, options)) {
      verdict.status = Status::violated;
      verdict.witness = Witness{probe, first, second};
    }
  }
  if (verdict.trials == 0) {
    throw Error(ErrorKind::EmptyProbeSet, std::string(to_string(axiom)) + ": no probe applies to measure '" +
                                              measure.name + "'");
  }
  return verdict;
}

AxiomVerdict check_strict_monotonicity(const MeasureUnderTest& m, const std::vector<Probe>& p,
                                       const AuditOptions& o) {
  return check_axiom(m, Axiom::strict_monotonicity, p, o);
}
AxiomVerdict check_case_mix_insensitivity(const MeasureUnderTest& m, const std::vector<Probe>& p,
                                          const AuditOptions& o) {
  return check_axiom(m, Axiom::case_mix_insensitivity, p, o);
}
AxiomVerdict check_scale_insensitivity(const MeasureUnderTest& m, const std::vector<Probe>& p,
                                       const AuditOptions& o) {
  return check_axiom(m, Axiom::scale_insensitivity, p, o);
}
AxiomVerdict check_equivalence(const MeasureUnderTest& m, const std::vector<Probe>& p, const AuditOptions& o) {
  return check_axiom(m, Axiom::equivalence, p, o);
}
AxiomVerdict check_dominance(const MeasureUnderTest& m, const std::vector<Probe>& p, const AuditOptions& o) {
  return check_axiom(m, Axiom::dominance, p, o);
}

std::vector<Probe> scenario_probes(Axiom axiom) {
  std::vector<Probe> probes;
  switch (axiom) {
    case Axiom::strict_monotonicity:
      probes.push_back(subject_change("actual-int w11=0.8 p11 0.5->0.55", axiom, spec_of(ScenarioName::actual_int, 0.8),
                                      0.5, 0.55, "H1", false));
      probes.push_back(subject_change("actual-ext p11 0.1->0.15", axiom, spec_of(ScenarioName::actual_ext), 0.1, 0.15,
                                      "H1", true));
      break;
    case Axiom::case_mix_insensitivity:
      probes.push_back(
          subject_change("casemix-ext eta 0->5", axiom, spec_of(ScenarioName::casemix_ext), 0.0, 5.0, "H1", true));
      probes.push_back(
          subject_change("casemix-int eta 0->10", axiom, spec_of(ScenarioName::casemix_int), 0.0, 10.0, "H1", false));
      break;
    case Axiom::scale_insensitivity:
      for (double lambda : {2.0, 3.0, 4.0, 5.0}) {
        probes.push_back(subject_change("scale-ext lambda 1->" + num(lambda), axiom, spec_of(ScenarioName::scale_ext),
                                        1.0, lambda, "H1", true));
      }
      probes.push_back(
          subject_change("scale-int lambda 1->2", axiom, spec_of(ScenarioName::scale_int), 1.0, 2.0, "H1", false));
      break;
    case Axiom::equivalence: {
      const auto spec = spec_of(ScenarioName::actual_ext);
      probes.push_back(comparison("actual-ext p11=p21=0.05", axiom, spec, 0.05, "H1", "H2", true));
      for (double p : make_grid(0.0, 1.0, 0.05)) {
        probes.push_back(comparison("actual-ext sweep p11=p21=" + num(p), axiom, spec, p, "H1", "H2", true));
      }
      Probe same;
      same.label = "identical rates, different case mix";
      same.axiom = axiom;
      same.subject = HospitalId("H1");
      same.other = HospitalId("H2");
      auto cells = [](double n1, double p1, double n2, double p2) {
        return std::map<StratumId, StratumCell>{{StratumId("1"), {n1, p1}}, {StratumId("2"), {n2, p2}}};
      };
      same.before.cohort = Cohort({StratumTable(HospitalId("H1"), cells(10, 0.05, 2, 0.2)),
                                   StratumTable(HospitalId("H2"), cells(2, 0.05, 10, 0.2)),
                                   StratumTable(HospitalId("H3"), cells(10, 0.1, 10, 0.1))});
      same.before.standard = ExternalStandard({{StratumId("1"), 0.1}, {StratumId("2"), 0.15}});
      probes.push_back(std::move(same));
      break;
    }
    case Axiom::dominance: {
      const auto spec = spec_of(ScenarioName::expected_ext);
      probes.push_back(comparison("expected-ext pe1=0.2", axiom, spec, 0.2, "H2", "H1", true));
      for (double pe : make_grid(0.0, 0.5, 0.01)) {
        probes.push_back(comparison("expected-ext sweep pe1=" + num(pe), axiom, spec, pe, "H2", "H1", true));
      }
      auto probe = comparison("actual-int w11=1 p11=1", axiom, spec_of(ScenarioName::actual_int, 1.0), 1.0, "H3", "H1",
                              false);
      probe.supplied_rates[HospitalId("H3")][StratumId("1")] = 1.0;
      probes.push_back(std::move(probe));
      break;
    }
  }
  return probes;
}

std::vector<Probe> random_probes(Axiom axiom, std::uint64_t seed, std::size_t count) {
  const auto salt = 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(axiom) + 1);
  Rng rng(splitmix64(seed ^ salt));
  std::vector<Probe> probes;
  probes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) probes.push_back(random_probe(axiom, rng, i));
  return probes;
}

std::vector<Probe> probe_set(Axiom axiom, std::uint64_t seed, std::size_t count) {
  auto probes = scenario_probes(axiom);
  auto extra = random_probes(axiom, seed, count);
  probes.insert(probes.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
  return probes;
}

bool replay_witness(const MeasureUnderTest& measure, const Witness& witness, const AuditOptions& options) {
  validate_probe(witness.probe);
  const auto [first, second] = evaluate_probe(measure, witness.probe);
  return first == witness.first_value && second == witness.second_value &&
         is_violation(witness.probe.axiom, first, second, options);
}

AuditMatrix run_audit(const std::vector<MeasureUnderTest>& extra, std::uint64_t seed, const AuditOptions& options) {
  std::vector<MeasureUnderTest> measures{smr_external_measure(), smr_internal_measure()};
  measures.insert(measures.end(), extra.begin(), extra.end());

  AuditMatrix matrix;
  matrix.seed = seed;
  matrix.random_trials = options.random_trials;
  for (const auto& measure : measures) matrix.rows.push_back(AuditRow{measure.name, measure.scheme, {}});

  for (std::size_t a = 0; a < kAllAxioms.size(); ++a) {
    const auto probes = probe_set(kAllAxioms[a], seed, options.random_trials);
    for (std::size_t m = 0; m < measures.size(); ++m) {
      matrix.rows[m].verdicts[a] = check_axiom(measures[m], kAllAxioms[a], probes, options);
    }
  }
  return matrix;
}

std::array<Status, 5> reference_row(Scheme scheme) noexcept {
  if (scheme == Scheme::external) {
    return {Status::holds, Status::violated, Status::holds, Status::violated, Status::violated};
  }
  return {Status::violated, Status::violated, Status::violated, Status::violated, Status::violated};
}

bool matches_reference(const AuditMatrix& matrix) {
  std::size_t found = 0;
  for (const auto& row : matrix.rows) {
    Scheme scheme;
    if (row.measure == "smr-external") {
      scheme = Scheme::external;
    } else if (row.measure == "smr-internal") {
      scheme = Scheme::internal;
    } else {
      continue;
    }
    ++found;
    const auto expected = reference_row(scheme);
    for (std::size_t a = 0; a < expected.size(); ++a) {
      if (row.verdicts[a].status != expected[a]) return false;
      if (row.verdicts[a].status == Status::violated && !row.verdicts[a].witness) return false;
    }
  }
  return found == 2;
}

}  // namespace smr
