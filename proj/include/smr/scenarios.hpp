#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smr/types.hpp"

namespace smr {

/// The seven illustrative configurations, one per varied quantity and
/// standardization scheme.
enum class ScenarioName {
  casemix_ext,   // shift eta patients from stratum 1 to 2, external standard
  scale_ext,     // scale one hospital by lambda, external standard
  actual_ext,    // vary p11 = p21, external standard
  expected_ext,  // vary the standard rate of stratum 1
  casemix_int,   // shift eta patients in hospital 1, internal standard
  scale_int,     // scale hospital 1 by lambda, internal standard
  actual_int,    // vary p11 with hospital 1 holding share w11 of stratum 1
};

inline constexpr ScenarioName kAllScenarios[] = {
    ScenarioName::casemix_ext, ScenarioName::scale_ext,   ScenarioName::actual_ext,
    ScenarioName::expected_ext, ScenarioName::casemix_int, ScenarioName::scale_int,
    ScenarioName::actual_int,
};

std::string_view to_string(ScenarioName name) noexcept;
/// Accepts the hyphenated names ("casemix-ext", ...). Throws InvalidInput.
ScenarioName parse_scenario_name(std::string_view text);

Scheme scheme_of(ScenarioName name) noexcept;
/// "eta", "lambda", "p11" or "pe1".
std::string_view sweep_parameter(ScenarioName name) noexcept;

struct ScenarioSpec {
  ScenarioName name = ScenarioName::casemix_ext;
  std::vector<double> grid;
  /// Only "w11" (actual-int) is recognised.
  std::map<std::string, double> overrides;
  /// Reject fractional patient counts at every grid point.
  bool integer_only = false;
};

struct GridBounds {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;
};

GridBounds default_grid(ScenarioName name) noexcept;

/// Default grid: integer steps for eta, 0.1 steps on [1,5] for lambda, and
/// 0.005 steps for rates.
ScenarioSpec default_spec(ScenarioName name);

/// min, min + step, ... up to max (inclusive within half a step).
std::vector<double> make_grid(double min, double max, double step);

/// Materializes the configuration with the sweep parameter set to `at`.
/// Throws ParameterOutOfRange.
Scenario build_scenario(const ScenarioSpec& spec, double at);

struct SweepSeries {
  ScenarioName name = ScenarioName::casemix_ext;
  std::string parameter;
  Scheme scheme = Scheme::external;
  std::vector<double> values;
  std::map<HospitalId, std::vector<double>> smr;
  std::map<std::string, double> overrides;
};

/// SMR of one hospital at one parameter value under the scenario's scheme.
double scenario_smr(const ScenarioSpec& spec, double at, const HospitalId& hospital);

SweepSeries run_sweep(const ScenarioSpec& spec);

/// First parameter value at which SMR_a - SMR_b changes sign along the grid,
/// refined by bisection on the model until |SMR_a - SMR_b| <= 1e-9.
/// Throws UnknownHospital.
std::optional<double> find_crossing(const ScenarioSpec& spec, const SweepSeries& series,
                                    const HospitalId& a, const HospitalId& b);

struct ClaimResult {
  std::string claim;
  bool passed = false;
  std::string detail;
};

/// Qualitative shape each sweep is expected to have.
std::vector<ClaimResult> check_claims(const ScenarioSpec& spec);

}  // namespace smr
