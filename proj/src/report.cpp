#include "smr/report.hpp"

#include "smr/error.hpp"
#include "smr/io.hpp"

namespace smr {

namespace {

bool scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

void write(const Json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad;
      out += Json(key).dump();
      out += ": ";
      write(value, out, depth + 1);
    }
    out += "\n" + close + "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    const bool inline_array = std::all_of(j.begin(), j.end(), scalar);
    out += inline_array ? "[" : "[\n";
    bool first = true;
    for (const auto& value : j) {
      if (!first) out += inline_array ? ", " : ",\n";
      first = false;
      if (!inline_array) out += pad;
      write(value, out, depth + 1);
    }
    out += inline_array ? "]" : "\n" + close + "]";
  } else if (j.is_number_float()) {
    const double value = j.get<double>();
    out += std::isfinite(value) ? report_number(value) : "null";
  } else {
    out += j.dump();
  }
}

Json optional_number(const std::optional<double>& value) { return value ? Json(*value) : Json(nullptr); }

const char* comparison_text(Axiom axiom) {
  switch (axiom) {
    case Axiom::strict_monotonicity: return "subject value after raising one stratum rate is not greater than before";
    case Axiom::case_mix_insensitivity: return "subject value moved when only its case mix changed";
    case Axiom::scale_insensitivity: return "subject value moved when only its size changed";
    case Axiom::equivalence: return "subject and other receive different values";
    case Axiom::dominance: return "dominant subject is not ranked strictly better than other";
  }
  return "";
}

}  // namespace

std::string dump_report(const Json& value) {
  std::string out;
  write(value, out, 0);
  out += '\n';
  return out;
}

Json make_report(const std::string& command, const std::string& inputs_digest, Json results,
                 const std::vector<std::string>& warnings) {
  Json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = command;
  report["inputs_digest"] = inputs_digest;
  report["results"] = std::move(results);
  report["warnings"] = warnings;
  return report;
}

Json to_json(const Scenario& scenario) {
  Json hospitals = Json::array();
  for (const auto& table : scenario.cohort.hospitals()) {
    Json strata = Json::array();
    for (const auto& [stratum, cell] : table.cells()) {
      strata.push_back({{"id", stratum.str()}, {"patients", cell.count}, {"rate", optional_number(cell.rate)}});
    }
    hospitals.push_back({{"id", table.hospital().str()}, {"strata", std::move(strata)}});
  }
  Json standard = nullptr;
  if (scenario.standard) {
    standard = Json::object();
    for (const auto& [stratum, rate] : scenario.standard->rates()) standard[stratum.str()] = rate;
  }
  return {{"hospitals", std::move(hospitals)}, {"standard", std::move(standard)}};
}

Scenario scenario_from_json(const Json& json) {
  try {
    std::vector<StratumTable> tables;
    for (const auto& hospital : json.at("hospitals")) {
      std::map<StratumId, StratumCell> cells;
      for (const auto& cell : hospital.at("strata")) {
        std::optional<double> rate;
        if (!cell.at("rate").is_null()) rate = cell.at("rate").get<double>();
        cells.emplace(StratumId(cell.at("id").get<std::string>()), StratumCell{cell.at("patients").get<double>(), rate});
      }
      tables.emplace_back(HospitalId(hospital.at("id").get<std::string>()), std::move(cells));
    }
    Scenario scenario{Cohort(std::move(tables)), std::nullopt};
    const auto& standard = json.at("standard");
    if (!standard.is_null()) {
      std::map<StratumId, double> rates;
      for (const auto& [stratum, rate] : standard.items()) rates.emplace(StratumId(stratum), rate.get<double>());
      scenario.standard = ExternalStandard(std::move(rates));
    }
    return scenario;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("scenario JSON: ") + e.what());
  }
}

Json to_json(const Probe& probe) {
  Json supplied = Json::object();
  for (const auto& [hospital, rates] : probe.supplied_rates) {
    Json row = Json::object();
    for (const auto& [stratum, rate] : rates) row[stratum.str()] = rate;
    supplied[hospital.str()] = std::move(row);
  }
  return {
      {"label", probe.label},
      {"axiom", std::string(to_string(probe.axiom))},
      {"subject", probe.subject.str()},
      {"other", probe.other ? Json(probe.other->str()) : Json(nullptr)},
      {"external_only", probe.external_only},
      {"before", to_json(probe.before)},
      {"after", probe.after ? to_json(*probe.after) : Json(nullptr)},
      {"supplied_rates", std::move(supplied)},
  };
}

Probe probe_from_json(const Json& json) {
  try {
    Probe probe;
    probe.label = json.at("label").get<std::string>();
    probe.axiom = parse_axiom(json.at("axiom").get<std::string>());
    probe.subject = HospitalId(json.at("subject").get<std::string>());
    if (!json.at("other").is_null()) probe.other = HospitalId(json.at("other").get<std::string>());
    probe.external_only = json.at("external_only").get<bool>();
    probe.before = scenario_from_json(json.at("before"));
    if (!json.at("after").is_null()) probe.after = scenario_from_json(json.at("after"));
    for (const auto& [hospital, rates] : json.at("supplied_rates").items()) {
      for (const auto& [stratum, rate] : rates.items()) {
        probe.supplied_rates[HospitalId(hospital)][StratumId(stratum)] = rate.get<double>();
      }
    }
    return probe;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("probe JSON: ") + e.what());
  }
}

Json to_json(const Witness& witness) {
  return {
      {"comparison", comparison_text(witness.probe.axiom)},
      {"first_value", witness.first_value},
      {"second_value", witness.second_value},
      {"probe", to_json(witness.probe)},
  };
}

Witness witness_from_json(const Json& json) {
  try {
    return Witness{probe_from_json(json.at("probe")), json.at("first_value").get<double>(),
                   json.at("second_value").get<double>()};
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("witness JSON: ") + e.what());
  }
}

Json to_json(const AxiomVerdict& verdict) {
  const std::string summary = verdict.status == Status::holds
                                  ? "no violation found in " + std::to_string(verdict.trials) + " trials"
                                  : "violated";
  return {
      {"axiom", std::string(to_string(verdict.axiom))},
      {"status", to_string(verdict.status)},
      {"summary", summary},
      {"trials", verdict.trials},
      {"skipped", verdict.skipped},
      {"witness", verdict.witness ? to_json(*verdict.witness) : Json(nullptr)},
  };
}

Json to_json(const AuditMatrix& matrix) {
  Json rows = Json::array();
  for (const auto& row : matrix.rows) {
    Json verdicts = Json::array();
    for (const auto& verdict : row.verdicts) verdicts.push_back(to_json(verdict));
    rows.push_back({{"measure", row.measure}, {"scheme", to_string(row.scheme)}, {"verdicts", std::move(verdicts)}});
  }
  return {{"seed", matrix.seed}, {"random_trials", matrix.random_trials}, {"rows", std::move(rows)}};
}

Json to_json(const SmrResult& result) {
  return {
      {"hospital", result.hospital.str()},
      {"scheme", to_string(result.scheme)},
      {"actual_rate", result.actual_rate},
      {"expected_rate", result.expected_rate},
      {"smr", result.smr},
  };
}

Json to_json(const SensitivityReport& report) {
  Json strata = Json::array();
  for (const auto& effect : report.strata) {
    strata.push_back({{"stratum", effect.stratum.str()},
                      {"value", effect.value},
                      {"direction", to_string(effect.direction)},
                      {"condition", effect.condition}});
  }
  Json diagnostics = Json::object();
  for (const auto& [key, value] : report.diagnostics) diagnostics[key] = value;
  return {
      {"analysis", report.analysis},
      {"value", report.value},
      {"sign", to_string(report.sign)},
      {"condition", report.condition},
      {"fd_check", optional_number(report.fd_check)},
      {"check_kind", report.check_kind == CheckKind::direct_recompute ? "direct_recompute" : "central_difference"},
      {"check_agrees", report.fd_check ? Json(fd_agrees(report)) : Json(nullptr)},
      {"degenerate", report.degenerate},
      {"diagnostics", std::move(diagnostics)},
      {"strata", std::move(strata)},
      {"notes", report.notes},
  };
}

Json to_json(const SweepSeries& series) {
  Json overrides = Json::object();
  for (const auto& [key, value] : series.overrides) overrides[key] = value;
  Json smr = Json::object();
  for (const auto& [hospital, values] : series.smr) smr[hospital.str()] = values;
  return {
      {"scenario", std::string(to_string(series.name))},
      {"parameter", series.parameter},
      {"scheme", to_string(series.scheme)},
      {"overrides", std::move(overrides)},
      {"values", series.values},
      {"smr", std::move(smr)},
  };
}

Json to_json(const std::vector<ClaimResult>& claims) {
  Json out = Json::array();
  for (const auto& claim : claims) {
    out.push_back({{"claim", claim.claim}, {"passed", claim.passed}, {"detail", claim.detail}});
  }
  return out;
}

std::string sweep_to_csv(const SweepSeries& series) {
  std::string out = quote_csv_field(series.parameter);
  for (const auto& [hospital, values] : series.smr) out += "," + quote_csv_field(hospital.str());
  out += '\n';
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    out += report_number(series.values[i]);
    for (const auto& [hospital, values] : series.smr) out += "," + report_number(values[i]);
    out += '\n';
  }
  return out;
}

}  // namespace smr
