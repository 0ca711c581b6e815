#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "identity_suite.hpp"
#include "smr/audit.hpp"
#include "smr/cli.hpp"
#include "smr/core.hpp"
#include "smr/io.hpp"
#include "smr/scenarios.hpp"
#include "support.hpp"

namespace {

using namespace smr;
using test::H;

constexpr double kExact = 1e-12;
constexpr double kCrossingTolerance = 1e-6;
constexpr double kUnityTolerance = 1e-3;
constexpr std::size_t kAuditTrials = 10000;
constexpr std::size_t kIdentityConfigs = 1000;
constexpr std::size_t kRoundTrips = 100;

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> check;
};

std::string num(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

Outcome scale_external_constant() {
  const auto pe = test::standard({{"1", 0.1}, {"2", 0.1}});
  double worst = 0.0;
  for (int lambda = 1; lambda <= 5; ++lambda) {
    const auto t = test::table("H", {{"1", 20.0 * lambda, 0.05}, {"2", 40.0 * lambda, 0.15}});
    worst = std::max({worst, std::abs(actual_deaths(t) - 7.0 * lambda),
                      std::abs(expected_deaths(t, pe.rates()) - 6.0 * lambda),
                      std::abs(smr_external(t, pe).smr - 7.0 / 6.0)});
  }
  return {worst <= kExact, "max deviation " + num(worst)};
}

Outcome expected_crossing() {
  const auto spec = default_spec(ScenarioName::expected_ext);
  const auto crossing = find_crossing(spec, run_sweep(spec), H("H1"), H("H2"));
  if (!crossing) return {false, "no crossing found"};
  return {std::abs(*crossing - 0.14) <= kCrossingTolerance, "crossing at " + num(*crossing)};
}

Outcome audit_matrix() {
  AuditOptions options;
  options.random_trials = kAuditTrials;
  const auto matrix = run_audit({}, 0, options);
  if (!matches_reference(matrix)) return {false, "matrix differs from reference"};
  const std::vector<MeasureUnderTest> measures{smr_external_measure(), smr_internal_measure()};
  std::size_t witnesses = 0;
  for (std::size_t m = 0; m < 2; ++m) {
    for (const auto& v : matrix.rows[m].verdicts) {
      if (v.status != Status::violated) continue;
      if (!v.witness || !replay_witness(measures[m], *v.witness)) {
        return {false, std::string(to_string(v.axiom)) + " witness does not replay"};
      }
      ++witnesses;
    }
  }
  return {true, std::to_string(witnesses) + " witnesses replayed, " + std::to_string(kAuditTrials) + " probes/axiom"};
}

Outcome identities() {
  const auto stats = test::run_identity_suite(20240101, kIdentityConfigs);
  std::string detail = std::to_string(stats.configs) + " configs, " + std::to_string(stats.exact_checks) + " exact, " +
                       std::to_string(stats.derivative_checks) + " derivative, worst exact " + num(stats.worst_exact) +
                       ", worst relative " + num(stats.worst_relative);
  if (stats.failures > 0) detail += "; first failure: " + stats.first_failure;
  return {stats.failures == 0, detail};
}

Outcome internal_paradoxes() {
  auto actual = default_spec(ScenarioName::actual_int);
  actual.overrides["w11"] = 0.8;
  double previous = scenario_smr(actual, 0.4, H("H1"));
  for (int i = 1; i <= 12; ++i) {
    const double v = scenario_smr(actual, 0.4 + 0.05 * i, H("H1"));
    if (!(v < previous)) return {false, "(a) not decreasing at p11=" + num(0.4 + 0.05 * i)};
    previous = v;
  }

  const auto casemix = run_sweep(default_spec(ScenarioName::casemix_int));
  const auto& h1 = casemix.smr.at(H("H1"));
  int changes = 0;
  double last_slope = 0.0;
  for (std::size_t i = 1; i < h1.size(); ++i) {
    const double slope = h1[i] - h1[i - 1];
    if (last_slope != 0.0 && slope != 0.0 && (slope > 0) != (last_slope > 0)) ++changes;
    if (slope != 0.0) last_slope = slope;
  }
  if (changes != 1) return {false, "(b) " + std::to_string(changes) + " slope sign changes"};

  const auto scale = default_spec(ScenarioName::scale_int);
  const double far = scenario_smr(scale, 1e6, H("H1"));
  if (!(std::abs(far - 1.0) < kUnityTolerance)) return {false, "(c) SMR at 1e6 is " + num(far)};
  double gap = std::abs(scenario_smr(scale, 1.0, H("H1")) - 1.0);
  for (int k = 1; k <= 24; ++k) {
    const double lambda = std::pow(10.0, k / 4.0);
    const double next = std::abs(scenario_smr(scale, lambda, H("H1")) - 1.0);
    if (next > gap) return {false, "(c) |SMR-1| rises at lambda=" + num(lambda)};
    gap = next;
  }
  return {true, "(a) 13 points decreasing, (b) 1 slope sign change, (c) SMR(1e6)=" + num(far)};
}

Outcome dominance_witnesses() {
  const auto expected = default_spec(ScenarioName::expected_ext);
  const double e1 = scenario_smr(expected, 0.2, H("H1"));
  const double e2 = scenario_smr(expected, 0.2, H("H2"));
  auto actual = default_spec(ScenarioName::actual_int);
  actual.overrides["w11"] = 1.0;
  const double a1 = scenario_smr(actual, 1.0, H("H1"));
  const double a3 = scenario_smr(actual, 1.0, H("H3"));
  const auto a = build_scenario(actual, 1.0);
  const bool h3_better = a.cohort.at(H("H3")).at(StratumId("2")).rate < a.cohort.at(H("H1")).at(StratumId("2")).rate;
  return {e1 < e2 && a1 < a3 && h3_better,
          "expected-ext " + num(e1) + " < " + num(e2) + ", actual-int " + num(a1) + " < " + num(a3)};
}

std::string invoke(const std::vector<const char*>& args, int& code) {
  std::ostringstream out;
  std::ostringstream err;
  code = run_cli(static_cast<int>(args.size()), args.data(), out, err);
  return out.str();
}

Outcome round_trip_and_determinism() {
  test::Generator gen(7);
  for (std::size_t i = 0; i < kRoundTrips; ++i) {
    const auto config = gen.config(1);
    const auto text = emit_hospitals_csv(config.cohort);
    if (!(parse_hospitals_csv(text) == config.cohort)) return {false, "cohort " + std::to_string(i) + " lost data"};
    if (!(parse_standard_csv(emit_standard_csv(config.standard)) == config.standard)) {
      return {false, "standard " + std::to_string(i) + " lost data"};
    }
  }
  const std::vector<const char*> args{"smr-axioms", "--seed", "7", "audit", "--trials", "1000"};
  int first_code = 0;
  int second_code = 0;
  const auto first = invoke(args, first_code);
  const auto second = invoke(args, second_code);
  if (first_code != 0 || second_code != 0) return {false, "audit exited nonzero"};
  if (first != second) return {false, "audit reports differ"};
  return {true, std::to_string(kRoundTrips) + " cohorts round-tripped; audit report " + sha256_hex(first).substr(0, 16)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "scale-invariant external SMR", 1.0, scale_external_constant},
      {2, "expected-rate crossing", 1.0, expected_crossing},
      {3, "audit matrix", 30.0, audit_matrix},
      {4, "closed-form identities", 60.0, identities},
      {5, "internal standardization paradoxes", 1.0, internal_paradoxes},
      {6, "dominance violation witnesses", 1.0, dominance_witnesses},
      {7, "round-trip and determinism", 10.0, round_trip_and_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool passed = outcome.passed && seconds < c.budget_seconds;
    if (outcome.passed && !passed) outcome.detail += "; over budget";
    if (!passed) ++failed;
    std::printf("%s %d %s (%.3fs < %.0fs): %s\n", passed ? "PASS" : "FAIL", c.id, c.name, seconds, c.budget_seconds,
                outcome.detail.c_str());
  }
  return failed == 0 ? 0 : 1;
}
