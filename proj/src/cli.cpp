#include "smr/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "smr/audit.hpp"
#include "smr/core.hpp"
#include "smr/error.hpp"
#include "smr/io.hpp"
#include "smr/report.hpp"
#include "smr/scenarios.hpp"
#include "smr/sensitivity.hpp"

namespace smr {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Global {
  std::string scheme = "external";
  std::string format = "json";
  bool pretty = false;
  std::string out_path;
  std::uint64_t seed = 0;
  double tolerance = 1e-12;
};

struct Inputs {
  std::string hospitals;
  std::string standard;
  bool integer_counts = false;
};

struct SensitivityArgs {
  std::string analysis;
  std::string hospital;
  std::string other;
  std::string stratum;
  std::string from;
  std::string to;
  std::optional<double> eta;
  std::optional<double> lambda;
  std::optional<double> dp;
};

struct AuditArgs {
  std::size_t trials = 10000;
  bool expect_reference = false;
  std::vector<std::string> measures;
};

struct ScenarioArgs {
  std::string name;
  std::vector<std::string> overrides;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> step;
  std::vector<double> values;
  bool integer_only = false;
  bool check_claims = false;
};

/// What a command hands back: the report payload plus its csv/pretty forms.
struct Output {
  Json results;
  std::vector<std::string> warnings;
  std::string csv;
  std::string pretty;
  int status = 0;
};

class Style {
 public:
  explicit Style(bool enabled) : enabled_(enabled) {}
  std::string good(const std::string& text) const { return wrap("\x1b[32m", text); }
  std::string bad(const std::string& text) const { return wrap("\x1b[31m", text); }
  std::string bold(const std::string& text) const { return wrap("\x1b[1m", text); }

 private:
  std::string wrap(const char* code, const std::string& text) const {
    return enabled_ ? code + text + "\x1b[0m" : text;
  }
  bool enabled_;
};

Style make_style(const Global& global) {
  return Style(global.format == "pretty" && std::getenv("SMR_AXIOMS_NO_COLOR") == nullptr);
}

std::string fixed(double value, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << value;
  return out.str();
}

Scheme scheme_of(const Global& global) {
  return global.scheme == "internal" ? Scheme::internal : Scheme::external;
}

Ingested load(const Inputs& inputs, std::vector<std::string>& digest_parts) {
  std::optional<std::filesystem::path> standard;
  if (!inputs.standard.empty()) standard = inputs.standard;
  digest_parts.push_back(read_file(inputs.hospitals));
  if (standard) digest_parts.push_back(read_file(*standard));
  return ingest(inputs.hospitals, standard, CsvOptions{inputs.integer_counts});
}

const StratumTable& pick_hospital(const Cohort& cohort, const std::string& name) {
  if (name.empty()) {
    if (cohort.size() != 1) throw UsageError("--hospital is required when the file holds several hospitals");
    return cohort.hospitals().front();
  }
  return cohort.at(HospitalId(name));
}

// compute -------------------------------------------------------------------

Output cmd_compute(const Global& global, const Ingested& data) {
  const auto scheme = scheme_of(global);
  Output output;
  std::vector<SmrResult> results;
  if (scheme == Scheme::external) {
    if (!data.standard) throw UsageError("--scheme external requires --standard");
    for (const auto& table : data.cohort.hospitals()) results.push_back(smr_external(table, *data.standard));
  } else {
    if (data.cohort.size() == 0) throw UsageError("--scheme internal needs at least one hospital");
    if (data.standard) output.warnings.push_back("--standard is ignored under --scheme internal");
    if (data.cohort.size() == 1) output.warnings.push_back("single hospital: the internal SMR is 1 by construction");
    results = smr_internal_all(data.cohort);
  }

  Json rows = Json::array();
  std::string csv = "hospital_id,scheme,actual_rate,expected_rate,smr\n";
  std::ostringstream pretty;
  const auto style = make_style(global);
  pretty << style.bold("hospital        actual  expected   SMR") << '\n';
  for (const auto& r : results) {
    rows.push_back(to_json(r));
    csv += quote_csv_field(r.hospital.str()) + "," + to_string(r.scheme) + "," + report_number(r.actual_rate) + "," +
           report_number(r.expected_rate) + "," + report_number(r.smr) + "\n";
    pretty << std::left << std::setw(14) << r.hospital.str() << std::right << std::setw(8)
           << fixed(r.actual_rate, 4) << std::setw(10) << fixed(r.expected_rate, 4) << std::setw(6)
           << fixed(r.smr, 2) << '\n';
  }
  output.results = {{"scheme", to_string(scheme)}, {"hospitals", std::move(rows)}};
  output.csv = std::move(csv);
  output.pretty = pretty.str();
  return output;
}

// sensitivity ---------------------------------------------------------------

template <class T>
const T& need(const std::optional<T>& value, const char* flag) {
  if (!value) throw UsageError(std::string("this analysis requires ") + flag);
  return *value;
}

const std::string& need(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string("this analysis requires ") + flag);
  return value;
}

SensitivityReport dispatch_sensitivity(const Global& global, const SensitivityArgs& a, const Ingested& data,
                                       const StratumTable& table) {
  AnalysisOptions options;
  options.zero_tolerance = global.tolerance;
  const auto& cohort = data.cohort;
  const auto& hospital = table.hospital();

  if (scheme_of(global) == Scheme::external) {
    if (!data.standard) throw UsageError("--scheme external requires --standard");
    const auto& standard = *data.standard;
    if (a.analysis == "shift") {
      return omega_external(table, standard,
                            {StratumId(need(a.from, "--from")), StratumId(need(a.to, "--to")), need(a.eta, "--eta")},
                            options);
    }
    if (a.analysis == "scale") return scale_invariance_external(table, standard, {need(a.lambda, "--lambda")}, options);
    if (a.analysis == "me-actual") {
      return me_actual_external(table, standard, StratumId(need(a.stratum, "--stratum")), options);
    }
    if (a.analysis == "me-expected") {
      return me_expected_external(table, standard, StratumId(need(a.stratum, "--stratum")), options);
    }
    if (a.analysis == "uniform-actual") return dsmr_uniform_actual_external(table, standard, need(a.dp, "--dp"), options);
    if (a.analysis == "uniform-expected") {
      return dsmr_uniform_expected_external(table, standard, need(a.dp, "--dp"), options);
    }
    throw UsageError("--analysis " + a.analysis + " is only defined for --scheme internal");
  }

  if (a.analysis == "shift") {
    return omega_internal(cohort, hospital,
                          {StratumId(need(a.from, "--from")), StratumId(need(a.to, "--to")), need(a.eta, "--eta")},
                          options);
  }
  if (a.analysis == "scale") return delta_smr_scale_internal(cohort, hospital, {need(a.lambda, "--lambda")}, options);
  if (a.analysis == "me-actual") {
    return me_actual_internal(cohort, hospital, StratumId(need(a.stratum, "--stratum")), options);
  }
  if (a.analysis == "me-expected") {
    return dsmr_expected_internal(cohort, hospital, StratumId(need(a.stratum, "--stratum")), a.dp.value_or(1.0),
                                  options);
  }
  if (a.analysis == "uniform-actual") return dsmr_uniform_actual_internal(cohort, hospital, need(a.dp, "--dp"), options);
  if (a.analysis == "cross") {
    return me_cross_hospital_internal(cohort, hospital, HospitalId(need(a.other, "--other")),
                                      StratumId(need(a.stratum, "--stratum")), options);
  }
  if (a.analysis == "add-patients") {
    return add_patients_report(cohort, hospital, StratumId(need(a.stratum, "--stratum")), need(a.eta, "--eta"),
                               options);
  }
  throw UsageError("--analysis " + a.analysis + " is only defined for --scheme external");
}

Output cmd_sensitivity(const Global& global, const SensitivityArgs& args, const Ingested& data) {
  const auto& table = pick_hospital(data.cohort, args.hospital);
  const auto report = dispatch_sensitivity(global, args, data, table);

  Output output;
  Json results = {{"scheme", to_string(scheme_of(global))}, {"hospital", table.hospital().str()}};
  const Json fields = to_json(report);
  for (const auto& [key, value] : fields.items()) results[key] = value;
  output.results = std::move(results);
  if (report.degenerate) output.warnings.push_back("degenerate configuration; see notes");

  std::string csv = "field,value\n";
  csv += "analysis," + quote_csv_field(report.analysis) + "\n";
  csv += "value," + report_number(report.value) + "\n";
  csv += "sign," + std::string(to_string(report.sign)) + "\n";
  csv += "condition," + quote_csv_field(report.condition) + "\n";
  csv += "fd_check," + (report.fd_check ? report_number(*report.fd_check) : std::string()) + "\n";
  for (const auto& [key, value] : report.diagnostics) csv += quote_csv_field(key) + "," + report_number(value) + "\n";
  output.csv = std::move(csv);

  const auto style = make_style(global);
  std::ostringstream pretty;
  pretty << style.bold(report.analysis) << " (" << to_string(scheme_of(global)) << ", " << table.hospital().str()
         << ")\n";
  pretty << "  value      " << std::setprecision(6) << report.value << "  [" << to_string(report.sign) << "]\n";
  if (!report.condition.empty()) pretty << "  condition  " << report.condition << '\n';
  if (report.fd_check) {
    const bool agrees = fd_agrees(report);
    pretty << "  check      " << std::setprecision(6) << *report.fd_check << "  "
           << (agrees ? style.good("agrees") : style.bad("disagrees")) << '\n';
  }
  for (const auto& [key, value] : report.diagnostics) {
    pretty << "  " << std::left << std::setw(10) << key << " " << std::setprecision(6) << value << '\n';
  }
  for (const auto& effect : report.strata) {
    pretty << "  stratum " << effect.stratum.str() << ": " << std::setprecision(6) << effect.value << "  "
           << effect.condition << '\n';
  }
  for (const auto& note : report.notes) pretty << "  note: " << note << '\n';
  output.pretty = pretty.str();
  return output;
}

// audit ---------------------------------------------------------------------

Output cmd_audit(const Global& global, const AuditArgs& args, std::ostream& err) {
  std::vector<MeasureUnderTest> extra;
  for (const auto& name : args.measures) {
    extra.push_back(name == "constant" ? constant_measure() : actual_rate_measure());
  }
  AuditOptions options;
  options.random_trials = args.trials;
  options.insensitivity_tolerance = global.tolerance;
  const auto matrix = run_audit(extra, global.seed, options);

  Output output;
  output.results = to_json(matrix);
  if (args.expect_reference) {
    const bool matches = matches_reference(matrix);
    output.results["matches_expected"] = matches;
    if (!matches) {
      err << "audit: SMR rows differ from the expected compliance matrix\n";
      output.status = 1;
    }
  }

  std::string csv = "measure,axiom,status,trials,skipped,witness\n";
  for (const auto& row : matrix.rows) {
    for (const auto& v : row.verdicts) {
      csv += quote_csv_field(row.measure) + "," + std::string(to_string(v.axiom)) + "," + to_string(v.status) + "," +
             std::to_string(v.trials) + "," + std::to_string(v.skipped) + "," +
             (v.witness ? quote_csv_field(v.witness->probe.label) : std::string()) + "\n";
    }
  }
  output.csv = std::move(csv);

  const auto style = make_style(global);
  std::ostringstream pretty;
  pretty << style.bold("measure        monoton  casemix  scale    equiv    dominance") << '\n';
  for (const auto& row : matrix.rows) {
    pretty << std::left << std::setw(15) << row.measure;
    for (const auto& v : row.verdicts) {
      const std::string cell = v.status == Status::holds ? "yes" : "no";
      const std::string padded = cell + std::string(9 - cell.size(), ' ');
      pretty << (v.status == Status::holds ? style.good(padded) : style.bad(padded));
    }
    pretty << '\n';
  }
  pretty << "yes = no violation found in " << args.trials << " random trials plus fixed probes\n";
  for (const auto& row : matrix.rows) {
    for (const auto& v : row.verdicts) {
      if (!v.witness) continue;
      pretty << "  " << row.measure << " / " << to_string(v.axiom) << ": " << v.witness->probe.label << " ("
             << std::setprecision(6) << v.witness->first_value << " vs " << v.witness->second_value << ")\n";
    }
  }
  output.pretty = pretty.str();
  return output;
}

// scenario ------------------------------------------------------------------

ScenarioSpec scenario_spec(const ScenarioArgs& args) {
  ScenarioSpec spec;
  try {
    spec = default_spec(parse_scenario_name(args.name));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  spec.integer_only = args.integer_only;
  for (const auto& text : args.overrides) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw UsageError("--override expects key=value, got '" + text + "'");
    const auto key = text.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(text.substr(eq + 1), &used);
      if (used != text.size() - eq - 1) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw UsageError("--override value for '" + key + "' is not a number");
    }
    spec.overrides[key] = value;
  }
  if (!args.values.empty()) {
    if (args.min || args.max || args.step) throw UsageError("--values cannot be combined with --min/--max/--step");
    spec.grid = args.values;
  } else if (args.min || args.max || args.step) {
    const auto bounds = default_grid(spec.name);
    try {
      spec.grid = make_grid(args.min.value_or(bounds.min), args.max.value_or(bounds.max),
                            args.step.value_or(bounds.step));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  return spec;
}

Output cmd_scenario(const Global& global, const ScenarioArgs& args, std::ostream& err) {
  const auto spec = scenario_spec(args);
  const auto series = run_sweep(spec);

  Output output;
  Json grid;
  if (args.values.empty()) {
    const auto bounds = default_grid(spec.name);
    grid = {{"min", args.min.value_or(bounds.min)},
            {"max", args.max.value_or(bounds.max)},
            {"step", args.step.value_or(bounds.step)}};
  } else {
    grid = {{"explicit", true}};
  }
  output.results = {{"grid", std::move(grid)}, {"integer_only", spec.integer_only}, {"series", to_json(series)}};
  output.csv = sweep_to_csv(series);

  const auto style = make_style(global);
  std::ostringstream pretty;
  pretty << style.bold(std::string(to_string(spec.name)) + " (" + to_string(series.scheme) + ")") << '\n';
  pretty << std::setw(10) << series.parameter;
  for (const auto& [hospital, values] : series.smr) pretty << std::setw(10) << hospital.str();
  pretty << '\n';
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    pretty << std::setw(10) << fixed(series.values[i], 3);
    for (const auto& [hospital, values] : series.smr) pretty << std::setw(10) << fixed(values[i], 4);
    pretty << '\n';
  }

  if (args.check_claims) {
    const auto claims = check_claims(spec);
    output.results["claims"] = to_json(claims);
    bool all = true;
    for (const auto& c : claims) {
      all = all && c.passed;
      const std::string line = std::string(c.passed ? "PASS " : "FAIL ") + c.claim +
                               (c.detail.empty() ? "" : " (" + c.detail + ")");
      pretty << (c.passed ? style.good(line) : style.bad(line)) << '\n';
      if (global.format == "csv" || (global.format == "json" && !c.passed)) err << line << '\n';
    }
    output.results["claims_passed"] = all;
    if (!all) output.status = 1;
  }
  output.pretty = pretty.str();
  return output;
}

// plumbing ------------------------------------------------------------------

std::string inputs_digest(int argc, const char* const* argv, const std::vector<std::string>& contents) {
  std::string material;
  auto add = [&material](std::string_view part) {
    material += std::to_string(part.size());
    material += ':';
    material += part;
    material += '\n';
  };
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg = argv[i];
    if (arg == "--out") {
      ++i;
      continue;
    }
    if (arg.substr(0, 6) == "--out=") continue;
    add(arg);
  }
  for (const auto& content : contents) add(content);
  return sha256_hex(material);
}

void emit(const Global& global, const std::string& text, std::ostream& out) {
  if (global.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(global.out_path, std::ios::binary);
  if (!file) throw Error(ErrorKind::InvalidInput, "cannot write '" + global.out_path + "'");
  file << text;
  if (!file) throw Error(ErrorKind::InvalidInput, "failed writing '" + global.out_path + "'");
}

void add_inputs(CLI::App* cmd, Inputs& inputs) {
  cmd->add_option("--hospitals", inputs.hospitals, "hospitals CSV (" + std::string(kHospitalsHeader) + ")")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--standard", inputs.standard, "standard CSV (" + std::string(kStandardHeader) + ")")
      ->check(CLI::ExistingFile);
  cmd->add_flag("--integer-counts", inputs.integer_counts, "reject fractional patient counts");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Standardized mortality ratios, their sensitivities, and an axiom audit", "smr-axioms"};
  app.fallthrough();
  app.require_subcommand(1);

  Global global;
  app.add_option("--scheme", global.scheme, "standardization scheme")
      ->check(CLI::IsMember({"external", "internal"}))
      ->capture_default_str();
  app.add_option("--format", global.format, "output format")
      ->check(CLI::IsMember({"csv", "json", "pretty"}))
      ->capture_default_str();
  app.add_flag("--pretty", global.pretty, "same as --format pretty");
  app.add_option("--out", global.out_path, "write the report to this file");
  app.add_option("--seed", global.seed, "random seed")->capture_default_str();
  app.add_option("--tolerance", global.tolerance, "zero tolerance for signs and insensitivity checks")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  Inputs compute_inputs;
  auto* compute = app.add_subcommand("compute", "SMR per hospital");
  add_inputs(compute, compute_inputs);

  Inputs sensitivity_inputs;
  SensitivityArgs sens;
  auto* sensitivity = app.add_subcommand("sensitivity", "closed-form sensitivity of one hospital's SMR");
  add_inputs(sensitivity, sensitivity_inputs);
  sensitivity->add_option("--analysis", sens.analysis, "analysis")
      ->required()
      ->check(CLI::IsMember({"shift", "scale", "me-actual", "me-expected", "uniform-actual", "uniform-expected", "cross",
                             "add-patients"}));
  sensitivity->add_option("--hospital", sens.hospital, "hospital id");
  sensitivity->add_option("--other", sens.other, "second hospital id (cross)");
  sensitivity->add_option("--stratum", sens.stratum, "stratum id");
  sensitivity->add_option("--from", sens.from, "stratum patients leave (shift)");
  sensitivity->add_option("--to", sens.to, "stratum patients join (shift)");
  sensitivity->add_option("--eta", sens.eta, "patients moved or added");
  sensitivity->add_option("--lambda", sens.lambda, "scale factor")->check(CLI::PositiveNumber);
  sensitivity->add_option("--dp", sens.dp, "rate change for differentials");

  AuditArgs audit_args;
  auto* audit = app.add_subcommand("audit", "check SMR measures against the five axioms");
  audit->add_option("--trials", audit_args.trials, "random probes per axiom")->capture_default_str();
  audit->add_flag("--expect-paper", audit_args.expect_reference, "exit 1 unless the SMR rows match the expected matrix");
  audit->add_option("--measure", audit_args.measures, "extra built-in measure to audit")
      ->check(CLI::IsMember({"constant", "actual-rate"}));

  ScenarioArgs scenario_args;
  auto* scenario = app.add_subcommand("scenario", "SMR series for a built-in configuration");
  std::vector<std::string> names;
  for (auto name : kAllScenarios) names.emplace_back(to_string(name));
  scenario->add_option("--name", scenario_args.name, "scenario")->required()->check(CLI::IsMember(names));
  scenario->add_option("--override", scenario_args.overrides, "fixed parameter, key=value (w11)");
  scenario->add_option("--min", scenario_args.min, "grid start");
  scenario->add_option("--max", scenario_args.max, "grid end");
  scenario->add_option("--step", scenario_args.step, "grid step");
  scenario->add_option("--values", scenario_args.values, "explicit parameter values")->delimiter(',');
  scenario->add_flag("--integer-only", scenario_args.integer_only, "reject fractional patient counts");
  scenario->add_flag("--check-claims", scenario_args.check_claims, "verify the expected qualitative behaviour");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (global.pretty) global.format = "pretty";

  try {
    Output output;
    std::vector<std::string> contents;
    std::string command;
    if (*compute) {
      command = "compute";
      const auto data = load(compute_inputs, contents);
      output = cmd_compute(global, data);
    } else if (*sensitivity) {
      command = "sensitivity";
      const auto data = load(sensitivity_inputs, contents);
      output = cmd_sensitivity(global, sens, data);
    } else if (*audit) {
      command = "audit";
      output = cmd_audit(global, audit_args, err);
    } else {
      command = "scenario";
      output = cmd_scenario(global, scenario_args, err);
    }

    std::string text;
    if (global.format == "csv") {
      text = output.csv;
    } else if (global.format == "pretty") {
      text = output.pretty;
      for (const auto& w : output.warnings) text += "warning: " + w + "\n";
    } else {
      text = dump_report(make_report(command, inputs_digest(argc, argv, contents), std::move(output.results),
                                     output.warnings));
    }
    if (global.format == "csv") {
      for (const auto& w : output.warnings) err << "warning: " << w << '\n';
    }
    emit(global, text, out);
    return output.status;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const IngestError& e) {
    err << "error: " << e.source() << ":" << e.row();
    if (e.column()) err << ":" << *e.column();
    err << ": " << to_string(e.kind()) << ": " << e.reason() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::ParameterOutOfRange ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace smr
