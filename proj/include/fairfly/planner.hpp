#pragma once

#include "fairfly/dynamics.hpp"
#include "fairfly/fairness.hpp"
#include "fairfly/lengths.hpp"
#include "fairfly/scenario.hpp"
#include "fairfly/stl.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fairfly {

struct OptimizerConfig {
    double kappa = 25.0;
    int restarts = 4; // zero plan (or warm start) + seeded random ones
    int max_iterations = 400;
    double margin = 1e-3; // early exit once the exact robustness exceeds this
    int threads = 1;
    bool screen = true; // reject tuples whose reachable boxes already rule out success
    bool polish = true; // full maximisation on the chosen tuple
    std::uint64_t seed = 0;
    PruneRule prune = PruneRule::Dominance;
    int random_every = 5; // one random probe every this many outer iterations; 0 disables
    double enumeration_cap = FairestFirst::kDefaultEnumerationCap;
    stl::EvalOptions eval;
};

/// Fixed history in front of the optimised inputs (online re-solves).
/// prefix[n] holds UAV n's executed samples before its current position.
struct History {
    std::vector<std::vector<double>> prefix;
    int steps(int uav, int dim) const {
        return prefix.empty() ? 0 : static_cast<int>(prefix[uav].size()) / dim;
    }
};

struct InnerOptions {
    const InputPlan* warm_start = nullptr; // replaces the zero plan as restart 0
    const History* history = nullptr;
    int restarts = -1;       // -1: config value
    int max_iterations = -1; // -1: config value
    bool early_exit = true;
    std::uint64_t seed = 0;
};

struct InnerResult {
    InputPlan plan;
    stl::Trace trace; // full trace, history included
    double robustness = -stl::kDefaultBig; // exact
    bool feasible = false;                 // robustness > 0
    bool screened = false;                 // rejected by the reachability bound
    int restarts = 0;
    long iterations = 0;
    int dimension = 0; // number of scalar decision variables
    double wall_ms = 0.0;
};

struct SearchStats {
    int examined = 0;    // candidates handed to inner_maximize
    int inner_calls = 0; // of which actually optimised (not screened)
    int screened = 0;
    std::int64_t pruned_dominance = 0;
    std::int64_t pruned_fairness = 0;
    int random_probes = 0;
};

struct PlanTimings {
    double search_ms = 0.0;
    double polish_ms = 0.0;
    double total_ms = 0.0;
};

struct PlanResult {
    std::string algorithm; // "fairfly" or "baseline"
    bool feasible = false;
    LengthTuple tuple;
    double fairness = 0.0;
    std::vector<double> alpha;
    PLBox box;
    FairnessSpec spec;
    InnerResult inner;
    SearchStats stats;
    PlanTimings timings;
    SearchFrontier frontier;
};

/// Clip every temporal window so that no sub-formula reaches past the
/// lengths of the UAVs it mentions. Same robustness as the original on
/// traces with exactly these lengths.
stl::Formula truncate_mission(const stl::Formula& mission, const LengthTuple& lengths);

class Planner {
public:
    explicit Planner(Scenario scenario, OptimizerConfig config = {});

    const Scenario& scenario() const { return scenario_; }
    const OptimizerConfig& config() const { return config_; }
    const stl::Formula& mission() const { return mission_; }
    const PLBox& box() const { return box_; }

    /// Maximise robustness over input plans with these per-UAV step counts
    /// (counted after the history, if any). Budget exhaustion is not an
    /// error: the best plan found is returned with feasible = false.
    InnerResult inner_maximize(const FleetState& x0, const LengthTuple& steps, const InnerOptions& options = {}) const;

    PlanResult solve_fair(const FleetState& x0, const FairnessSpec& spec) const;
    /// Every UAV gets hrz(mission) steps; fairness scored against the box.
    PlanResult solve_baseline(const FleetState& x0, const FairnessSpec& spec) const;

    /// Total inner_maximize invocations made through this planner.
    long inner_invocations() const { return invocations_; }

private:
    Scenario scenario_;
    OptimizerConfig config_;
    stl::Formula mission_;
    PLBox box_;
    mutable long invocations_ = 0;
};

} // namespace fairfly
