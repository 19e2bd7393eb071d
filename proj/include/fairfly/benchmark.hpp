#pragma once

#include "fairfly/planner.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace fairfly {

struct BenchmarkConfig {
    std::vector<int> uav_counts{2, 3, 5};
    std::vector<std::string> algorithms{"baseline", "fairfly-f1", "fairfly-f2"};
    int seeds = 20;
    std::uint64_t base_seed = 1;
    double w = 0.75;
    bool online = true; // time the first online re-solve of every plan
    OptimizerConfig optimizer;
    int threads = 1; // concurrent runs
};

struct BenchmarkRow {
    std::string algorithm;
    int uav_count = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string failure;
    LengthTuple tuple;
    double robustness = 0.0;
    double fairness_f1 = 0.0; // every row is scored under both functions
    double fairness_f2 = 0.0;
    double offline_ms = 0.0;
    double online_first_ms = 0.0;
    int inner_calls = 0;
    int dimension = 0;
};

struct BenchmarkCell {
    std::string algorithm;
    int uav_count = 0;
    int samples = 0; // successful rows
    int failures = 0;
    double robustness = 0.0;
    double fairness_f1 = 0.0;
    double fairness_f2 = 0.0;
    double offline_ms = 0.0;
    double online_first_ms = 0.0;
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;
    std::vector<BenchmarkCell> cells;

    const BenchmarkCell& cell(const std::string& algorithm, int uav_count) const;
};

using ScenarioFactory = std::function<Scenario(int uav_count)>;

/// Runs every (algorithm, D, seed) combination. Failures become rows with
/// ok = false; they are never dropped.
BenchmarkReport run_benchmark(const BenchmarkConfig& config, const ScenarioFactory& make = {});

/// One row for a single (algorithm, scenario, seed).
BenchmarkRow run_one(const std::string& algorithm, const Scenario& scenario, std::uint64_t seed,
                     const BenchmarkConfig& config);

void write_benchmark_csv(std::ostream& out, const BenchmarkReport& report);

} // namespace fairfly
