#include "smr/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smr/core.hpp"
#include "smr/error.hpp"

namespace smr {

namespace {

struct Row {
  const char* stratum;
  double count;
  std::optional<double> rate;
};

StratumTable table(const char* hospital, std::initializer_list<Row> rows) {
  std::map<StratumId, StratumCell> cells;
  for (const auto& row : rows) cells.emplace(StratumId(row.stratum), StratumCell{row.count, row.rate});
  return StratumTable(HospitalId(hospital), std::move(cells));
}

ExternalStandard standard(std::initializer_list<std::pair<const char*, double>> rates) {
  std::map<StratumId, double> out;
  for (const auto& [stratum, rate] : rates) out.emplace(StratumId(stratum), rate);
  return ExternalStandard(std::move(out));
}

[[noreturn]] void out_of_range(ScenarioName name, const std::string& what) {
  throw Error(ErrorKind::ParameterOutOfRange, std::string(to_string(name)) + ": " + what);
}

void require_range(ScenarioName name, double at, double lo, double hi) {
  if (!std::isfinite(at) || at < lo || at > hi) {
    std::ostringstream msg;
    msg << sweep_parameter(name) << " = " << at << " outside [" << lo << ", " << hi << "]";
    out_of_range(name, msg.str());
  }
}

void require_positive(ScenarioName name, double at) {
  if (!std::isfinite(at) || !(at > 0.0)) {
    out_of_range(name, std::string(sweep_parameter(name)) + " must be > 0");
  }
}

double share_override(const ScenarioSpec& spec) {
  double share = 0.8;
  for (const auto& [key, value] : spec.overrides) {
    if (spec.name != ScenarioName::actual_int || key != "w11") {
      out_of_range(spec.name, "unknown override '" + key + "'");
    }
    if (!std::isfinite(value) || value < 0.0 || value > 1.0) out_of_range(spec.name, "w11 outside [0, 1]");
    share = value;
  }
  return share;
}

Scenario to_integer_counts(const Scenario& scenario, ScenarioName name) {
  std::vector<StratumTable> tables;
  for (const auto& t : scenario.cohort.hospitals()) {
    auto cells = t.cells();
    for (auto& [stratum, cell] : cells) {
      const double rounded = std::round(cell.count);
      if (std::abs(cell.count - rounded) > 1e-9 * std::max(1.0, rounded)) {
        out_of_range(name, "integer mode: hospital '" + t.hospital().str() + "' stratum '" +
                               stratum.str() + "' would hold a fractional patient count");
      }
      cell.count = rounded;
    }
    tables.emplace_back(t.hospital(), std::move(cells));
  }
  return Scenario{Cohort(std::move(tables)), scenario.standard};
}

bool strictly_monotone(const std::vector<double>& v, bool increasing) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (increasing ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1])) return false;
  }
  return true;
}

/// Sign changes of the discrete slope, ignoring flat steps.
int slope_sign_changes(const std::vector<double>& v) {
  int changes = 0;
  int previous = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double d = v[i] - v[i - 1];
    const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (previous != 0 && sign != previous) ++changes;
    previous = sign;
  }
  return changes;
}

std::string fmt(double value) {
  std::ostringstream out;
  out.precision(10);
  out << value;
  return out.str();
}

ClaimResult claim(std::string text, bool passed, std::string detail = {}) {
  return ClaimResult{std::move(text), passed, std::move(detail)};
}

const HospitalId kH1("H1");
const HospitalId kH2("H2");
const HospitalId kH3("H3");

}  // namespace

std::string_view to_string(ScenarioName name) noexcept {
  switch (name) {
    case ScenarioName::casemix_ext: return "casemix-ext";
    case ScenarioName::scale_ext: return "scale-ext";
    case ScenarioName::actual_ext: return "actual-ext";
    case ScenarioName::expected_ext: return "expected-ext";
    case ScenarioName::casemix_int: return "casemix-int";
    case ScenarioName::scale_int: return "scale-int";
    case ScenarioName::actual_int: return "actual-int";
  }
  return "?";
}

ScenarioName parse_scenario_name(std::string_view text) {
  for (auto name : kAllScenarios) {
    if (to_string(name) == text) return name;
  }
  throw Error(ErrorKind::InvalidInput, "unknown scenario '" + std::string(text) + "'");
}

Scheme scheme_of(ScenarioName name) noexcept {
  switch (name) {
    case ScenarioName::casemix_int:
    case ScenarioName::scale_int:
    case ScenarioName::actual_int: return Scheme::internal;
    default: return Scheme::external;
  }
}

std::string_view sweep_parameter(ScenarioName name) noexcept {
  switch (name) {
    case ScenarioName::casemix_ext:
    case ScenarioName::casemix_int: return "eta";
    case ScenarioName::scale_ext:
    case ScenarioName::scale_int: return "lambda";
    case ScenarioName::actual_ext:
    case ScenarioName::actual_int: return "p11";
    case ScenarioName::expected_ext: return "pe1";
  }
  return "?";
}

std::vector<double> make_grid(double min, double max, double step) {
  if (!std::isfinite(min) || !std::isfinite(max) || !std::isfinite(step) || !(step > 0.0) || max < min) {
    throw Error(ErrorKind::InvalidInput, "grid needs finite min <= max and step > 0");
  }
  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::floor((max - min) / step + 0.5));
  grid.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid.push_back(min + static_cast<double>(i) * step);
  return grid;
}

GridBounds default_grid(ScenarioName name) noexcept {
  switch (name) {
    case ScenarioName::casemix_ext: return {0.0, 20.0, 1.0};
    case ScenarioName::casemix_int: return {0.0, 50.0, 1.0};
    case ScenarioName::scale_ext:
    case ScenarioName::scale_int: return {1.0, 5.0, 0.1};
    case ScenarioName::actual_ext:
    case ScenarioName::actual_int: return {0.0, 1.0, 0.005};
    case ScenarioName::expected_ext: return {0.0, 0.5, 0.005};
  }
  return {};
}

ScenarioSpec default_spec(ScenarioName name) {
  ScenarioSpec spec;
  spec.name = name;
  const auto bounds = default_grid(name);
  spec.grid = make_grid(bounds.min, bounds.max, bounds.step);
  if (name == ScenarioName::actual_int) spec.overrides["w11"] = 0.8;
  return spec;
}

Scenario build_scenario(const ScenarioSpec& spec, double at) {
  const double w11 = share_override(spec);
  Scenario scenario;
  switch (spec.name) {
    case ScenarioName::casemix_ext:
      require_range(spec.name, at, 0.0, 20.0);
      scenario.cohort = Cohort({table("H1", {{"1", 20.0 - at, 0.2}, {"2", at, 0.1}, {"3", 5.0, 0.2}}),
                                table("H2", {{"1", 20.0 - at, 0.2}, {"2", at, 0.1}, {"3", 5.0, 0.1}})});
      scenario.standard = standard({{"1", 0.2}, {"2", 0.1}, {"3", 0.15}});
      break;
    case ScenarioName::scale_ext:
      require_positive(spec.name, at);
      scenario.cohort = Cohort({table("H1", {{"1", 20.0 * at, 0.05}, {"2", 40.0 * at, 0.15}})});
      scenario.standard = standard({{"1", 0.1}, {"2", 0.1}});
      break;
    case ScenarioName::actual_ext:
      require_range(spec.name, at, 0.0, 1.0);
      scenario.cohort = Cohort({table("H1", {{"1", 5.0, at}, {"2", 5.0, 0.15}, {"3", 0.0, std::nullopt}}),
                                table("H2", {{"1", 5.0, at}, {"2", 0.0, std::nullopt}, {"3", 5.0, 0.3}})});
      scenario.standard = standard({{"1", 0.1}, {"2", 0.15}, {"3", 0.3}});
      break;
    case ScenarioName::expected_ext:
      require_range(spec.name, at, 0.0, 1.0);
      scenario.cohort = Cohort({table("H1", {{"1", 5.0, 0.1}, {"2", 5.0, 0.2}}),
                                table("H2", {{"1", 5.0, 0.1}, {"2", 15.0, 0.15}})});
      scenario.standard = standard({{"1", at}, {"2", 0.1}});
      break;
    case ScenarioName::casemix_int:
      require_range(spec.name, at, 0.0, 50.0);
      scenario.cohort = Cohort({table("H1", {{"1", 50.0 - at, 0.1}, {"2", at, 0.3}}),
                                table("H2", {{"1", 25.0, 0.1}, {"2", 10.0, 0.1}})});
      break;
    case ScenarioName::scale_int:
      require_positive(spec.name, at);
      scenario.cohort = Cohort(
          {table("H1", {{"1", 50.0 * at, 0.3}, {"2", 50.0 * at, 0.2}, {"3", 0.0, std::nullopt}}),
           table("H2", {{"1", 50.0, 0.1}, {"2", 100.0, 0.1}, {"3", 0.0, std::nullopt}}),
           table("H3", {{"1", 0.0, std::nullopt}, {"2", 10.0, 0.25}, {"3", 10.0, 0.2}})});
      break;
    case ScenarioName::actual_int:
      require_range(spec.name, at, 0.0, 1.0);
      scenario.cohort = Cohort({table("H1", {{"1", 100.0 * w11, at}, {"2", 50.0, 0.4}}),
                                table("H2", {{"1", 100.0 * (1.0 - w11), 0.1}, {"2", 50.0, 0.1}}),
                                table("H3", {{"1", 0.0, std::nullopt}, {"2", 40.0, 0.3}})});
      break;
  }
  if (spec.integer_only) return to_integer_counts(scenario, spec.name);
  return scenario;
}

double scenario_smr(const ScenarioSpec& spec, double at, const HospitalId& hospital) {
  const auto scenario = build_scenario(spec, at);
  if (scheme_of(spec.name) == Scheme::external) {
    return smr_external(scenario.cohort.at(hospital), *scenario.standard).smr;
  }
  return smr_internal(scenario.cohort, hospital).smr;
}

SweepSeries run_sweep(const ScenarioSpec& spec) {
  if (spec.grid.empty()) throw Error(ErrorKind::InvalidInput, "sweep grid is empty");
  SweepSeries series;
  series.name = spec.name;
  series.parameter = std::string(sweep_parameter(spec.name));
  series.scheme = scheme_of(spec.name);
  series.values = spec.grid;
  series.overrides = spec.overrides;
  if (spec.name == ScenarioName::actual_int) series.overrides["w11"] = share_override(spec);

  for (double at : spec.grid) {
    const auto scenario = build_scenario(spec, at);
    if (series.scheme == Scheme::external) {
      for (const auto& t : scenario.cohort.hospitals()) {
        series.smr[t.hospital()].push_back(smr_external(t, *scenario.standard).smr);
      }
    } else {
      for (const auto& result : smr_internal_all(scenario.cohort)) {
        series.smr[result.hospital].push_back(result.smr);
      }
    }
  }
  return series;
}

std::optional<double> find_crossing(const ScenarioSpec& spec, const SweepSeries& series,
                                    const HospitalId& a, const HospitalId& b) {
  auto ia = series.smr.find(a);
  auto ib = series.smr.find(b);
  if (ia == series.smr.end() || ib == series.smr.end()) {
    throw Error(ErrorKind::UnknownHospital, "hospital not present in sweep series");
  }
  const auto& sa = ia->second;
  const auto& sb = ib->second;
  auto gap = [&](double x) { return scenario_smr(spec, x, a) - scenario_smr(spec, x, b); };

  for (std::size_t i = 0; i < series.values.size(); ++i) {
    const double d = sa[i] - sb[i];
    if (d == 0.0) return series.values[i];
    if (i + 1 == series.values.size()) break;
    const double next = sa[i + 1] - sb[i + 1];
    if (next == 0.0 || (d > 0.0) == (next > 0.0)) continue;

    double lo = series.values[i];
    double hi = series.values[i + 1];
    double f_lo = d;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double f_mid = gap(mid);
      if (f_mid == 0.0) return mid;
      if ((f_mid > 0.0) == (f_lo > 0.0)) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
    }
    const double x = 0.5 * (lo + hi);
    if (std::abs(gap(x)) > 1e-9) return std::nullopt;
    return x;
  }
  return std::nullopt;
}

std::vector<ClaimResult> check_claims(const ScenarioSpec& requested) {
  ScenarioSpec spec = default_spec(requested.name);
  for (const auto& [key, value] : requested.overrides) spec.overrides[key] = value;
  const auto series = run_sweep(spec);
  const auto& x = series.values;
  auto s = [&](const HospitalId& h) -> const std::vector<double>& { return series.smr.at(h); };
  std::vector<ClaimResult> claims;

  switch (spec.name) {
    case ScenarioName::casemix_ext: {
      claims.push_back(claim("H1 strictly increasing in eta", strictly_monotone(s(kH1), true)));
      claims.push_back(claim("H2 strictly decreasing in eta", strictly_monotone(s(kH2), false)));
      bool sides = true;
      for (std::size_t i = 0; i < x.size(); ++i) sides = sides && s(kH1)[i] > 1.0 && s(kH2)[i] < 1.0;
      claims.push_back(claim("H1 stays above 1 and H2 below 1", sides));
      claims.push_back(claim("H1 and H2 never cross", !find_crossing(spec, series, kH1, kH2)));
      break;
    }
    case ScenarioName::scale_ext: {
      double worst = 0.0;
      for (double v : s(kH1)) worst = std::max(worst, std::abs(v - 7.0 / 6.0));
      claims.push_back(claim("SMR constant at 7/6 for every lambda", worst <= 1e-12,
                             "max deviation " + fmt(worst)));
      break;
    }
    case ScenarioName::actual_ext: {
      const double h1 = scenario_smr(spec, 0.1, kH1);
      const double h2 = scenario_smr(spec, 0.1, kH2);
      claims.push_back(claim("both SMRs equal 1 at p11 = p21 = 0.1",
                             std::abs(h1 - 1.0) <= 1e-12 && std::abs(h2 - 1.0) <= 1e-12,
                             "H1 " + fmt(h1) + ", H2 " + fmt(h2)));
      bool below = true;
      bool above = true;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0.1 - 1e-9) below = below && s(kH1)[i] < s(kH2)[i];
        if (x[i] > 0.1 + 1e-9) above = above && s(kH1)[i] > s(kH2)[i];
      }
      claims.push_back(claim("H1 below H2 for p11 < 0.1", below));
      claims.push_back(claim("H1 above H2 for p11 > 0.1", above));
      break;
    }
    case ScenarioName::expected_ext: {
      const auto crossing = find_crossing(spec, series, kH1, kH2);
      claims.push_back(claim("SMRs cross at pe1 = 0.14",
                             crossing && std::abs(*crossing - 0.14) <= 1e-6,
                             crossing ? "crossing at " + fmt(*crossing) : "no crossing"));
      claims.push_back(claim("both SMRs strictly decreasing in pe1",
                             strictly_monotone(s(kH1), false) && strictly_monotone(s(kH2), false)));
      bool order = true;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0.14 - 1e-9) order = order && s(kH1)[i] > s(kH2)[i];
        if (x[i] > 0.14 + 1e-9) order = order && s(kH1)[i] < s(kH2)[i];
      }
      claims.push_back(claim("H1 ranked worse before the crossing and better after it", order));
      break;
    }
    case ScenarioName::casemix_int: {
      const int changes = slope_sign_changes(s(kH1));
      const auto& h1 = s(kH1);
      const auto peak = std::max_element(h1.begin(), h1.end()) - h1.begin();
      claims.push_back(claim("H1 has a single interior maximum in eta", changes == 1 && peak > 0 &&
                                                                            peak + 1 < static_cast<long>(h1.size()),
                             std::to_string(changes) + " slope sign change(s), peak at eta = " +
                                 fmt(x[static_cast<std::size_t>(peak)])));
      claims.push_back(claim("H2 strictly decreasing in eta", strictly_monotone(s(kH2), false)));
      bool sides = true;
      for (std::size_t i = 0; i < x.size(); ++i) {
        sides = sides && s(kH1)[i] >= 1.0 - 1e-12 && s(kH2)[i] <= 1.0 + 1e-12;
      }
      claims.push_back(claim("H1 at or above 1 and H2 at or below 1", sides));
      break;
    }
    case ScenarioName::scale_int: {
      bool all_fall = true;
      for (const auto& h : {kH1, kH2, kH3}) {
        all_fall = all_fall && scenario_smr(spec, 2.0, h) < scenario_smr(spec, 1.0, h);
      }
      claims.push_back(claim("doubling H1 lowers all three SMRs", all_fall));
      const auto crossing = find_crossing(spec, series, kH1, kH3);
      claims.push_back(claim("H1 falls below H3 for lambda in (2, 3)",
                             crossing && *crossing > 2.0 && *crossing < 3.0,
                             crossing ? "crossing at " + fmt(*crossing) : "no crossing"));
      bool approach = true;
      bool above = true;
      double previous = std::abs(scenario_smr(spec, 1.0, kH1) - 1.0);
      for (int i = 1; i <= 24; ++i) {
        const double smr = scenario_smr(spec, std::pow(10.0, i / 4.0), kH1);
        const double distance = std::abs(smr - 1.0);
        approach = approach && distance <= previous;
        above = above && smr > 1.0;
        previous = distance;
      }
      claims.push_back(claim("|SMR_H1 - 1| non-increasing over lambda = 10^(i/4), i = 0..24", approach));
      claims.push_back(claim("SMR_H1 stays above 1 (approaches without crossing)", above));
      const double far = scenario_smr(spec, 1e6, kH1);
      claims.push_back(claim("SMR_H1 within 1e-3 of 1 at lambda = 1e6", std::abs(far - 1.0) < 1e-3,
                             "SMR " + fmt(far)));
      break;
    }
    case ScenarioName::actual_int: {
      const double w11 = spec.overrides.at("w11");
      const auto& h3 = s(kH3);
      const auto [lo3, hi3] = std::minmax_element(h3.begin(), h3.end());
      claims.push_back(claim("H3 unaffected by p11", *hi3 - *lo3 <= 1e-12));
      if (w11 < 1.0) {
        claims.push_back(claim("H2 strictly decreasing in p11", strictly_monotone(s(kH2), false)));
      }
      std::vector<double> window;
      for (double p : make_grid(0.4, 1.0, 0.05)) window.push_back(scenario_smr(spec, p, kH1));
      if (std::abs(w11 - 0.6) <= 1e-12) {
        claims.push_back(claim("H1 strictly increasing in p11 on [0.4, 1]", strictly_monotone(window, true)));
      }
      if (w11 >= 0.8 - 1e-12) {
        claims.push_back(claim("H1 strictly decreasing in p11 on [0.4, 1]", strictly_monotone(window, false)));
      }
      if (w11 == 1.0) {
        const double h1 = scenario_smr(spec, 1.0, kH1);
        const double h3_at = scenario_smr(spec, 1.0, kH3);
        claims.push_back(claim("H1 below H3 at p11 = 1", h1 < h3_at, "H1 " + fmt(h1) + ", H3 " + fmt(h3_at)));
      }
      break;
    }
  }
  return claims;
}

}  // namespace smr
