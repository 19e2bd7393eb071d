#pragma once

#include "fairfly/benchmark.hpp"
#include "fairfly/online.hpp"
#include "fairfly/planner.hpp"
#include "fairfly/scenario.hpp"

#include "json.hpp"

#include <string>

namespace fairfly {

using Json = nlohmann::json;

Json to_json(const FairnessSpec& spec);
FairnessSpec fairness_from_json(const Json& j);

/// Schema version kScenarioSchemaVersion; see README for the fields.
Json to_json(const Scenario& scenario);
Scenario scenario_from_json(const Json& j);
Scenario load_scenario(const std::string& path);

Json to_json(const SearchFrontier& frontier);

/// Wall-clock fields live under "timings" only, so two runs with the same
/// seed differ nowhere else.
Json to_json(const PlanResult& plan, const FleetState& x0);
/// Restores what simulate_online needs: tuple, inputs, robustness, box.
PlanResult plan_from_json(const Json& j, FleetState* x0 = nullptr);

Json to_json(const OnlineRun& run);

BenchmarkConfig benchmark_config_from_json(const Json& j);
Json to_json(const BenchmarkReport& report);
BenchmarkReport report_from_json(const Json& j);
/// Series for the robustness / fairness / offline-time / online-time plots.
Json plot_data(const BenchmarkReport& report);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace fairfly
