#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "smr/audit.hpp"
#include "smr/scenarios.hpp"
#include "smr/sensitivity.hpp"
#include "smr/types.hpp"

namespace smr {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

/// Indented JSON with every floating-point number at 17 significant digits.
std::string dump_report(const Json& value);

Json make_report(const std::string& command, const std::string& inputs_digest, Json results,
                 const std::vector<std::string>& warnings);

Json to_json(const Scenario& scenario);
Scenario scenario_from_json(const Json& json);

Json to_json(const Probe& probe);
Probe probe_from_json(const Json& json);

Json to_json(const Witness& witness);
Witness witness_from_json(const Json& json);

Json to_json(const AxiomVerdict& verdict);
Json to_json(const AuditMatrix& matrix);

Json to_json(const SmrResult& result);
Json to_json(const SensitivityReport& report);

Json to_json(const SweepSeries& series);
Json to_json(const std::vector<ClaimResult>& claims);

/// One row per grid point, one column per hospital.
std::string sweep_to_csv(const SweepSeries& series);

}  // namespace smr
