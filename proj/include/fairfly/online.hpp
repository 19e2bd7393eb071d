#pragma once

#include "fairfly/planner.hpp"

#include <cstdint>
#include <vector>

namespace fairfly {

struct OnlineConfig {
    double noise = 0.0; // radius of the uniform position noise added after each step
    std::uint64_t seed = 0;
    int extra_restarts = 1;     // random restarts on top of the warm start
    bool force_resolve = false; // optimise even when the warm start keeps its promise
    int max_iterations = -1;    // online iterations to run; -1 until every UAV lands
};

struct OnlineIteration {
    int k = 0;         // steps executed before this re-solve
    int dimension = 0; // decision variables of the re-solve
    double robustness = 0.0;
    double solve_ms = 0.0;
    bool resolved = false; // false when the shifted plan was kept
    bool violation = false;
};

struct OnlineRun {
    stl::Trace executed;
    std::vector<OnlineIteration> iterations;
    double offline_robustness = 0.0;
    double first_solve_ms = 0.0;
    bool satisfied = false;
    double final_robustness = 0.0;
    int violations = 0;
    double noise = 0.0;
    std::uint64_t seed = 0;
};

struct StepOutcome {
    std::vector<std::vector<double>> first_inputs; // empty for landed UAVs
    InputPlan plan;                                // remaining inputs, first included
    InnerResult inner;
    bool resolved = false;
};

/// One shrinking-horizon re-solve. `history` holds the executed samples
/// before `state`; `remaining` the steps each UAV still flies; `promised`
/// the robustness the warm start must keep to be reused as is.
StepOutcome online_step(const Planner& planner, const FleetState& state, const History& history,
                        const LengthTuple& remaining, const InputPlan& warm_start, double promised,
                        const OnlineConfig& config, std::uint64_t seed);

/// Executes `plan` with re-solves after every step until all UAVs land.
OnlineRun simulate_online(const Planner& planner, const FleetState& x0, const PlanResult& plan,
                          const OnlineConfig& config);

} // namespace fairfly
