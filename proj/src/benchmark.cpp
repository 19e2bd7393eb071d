#include "fairfly/benchmark.hpp"
#include "fairfly/online.hpp"

#include <atomic>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace fairfly {

const BenchmarkCell& BenchmarkReport::cell(const std::string& algorithm, int uav_count) const {
    for (const auto& c : cells) {
        if (c.algorithm == algorithm && c.uav_count == uav_count) {
            return c;
        }
    }
    throw std::out_of_range("no benchmark cell for " + algorithm + " with D = " + std::to_string(uav_count));
}

BenchmarkRow run_one(const std::string& algorithm, const Scenario& scenario, std::uint64_t seed,
                     const BenchmarkConfig& config) {
    BenchmarkRow row;
    row.algorithm = algorithm;
    row.uav_count = scenario.uav_count();
    row.seed = seed;
    try {
        OptimizerConfig opt = config.optimizer;
        opt.seed = seed;
        const Planner planner(scenario, opt);
        const FleetState x0 = sample_initial(scenario.takeoff_boxes(), seed);
        const FairnessSpec f1_spec{FairnessKind::F1, config.w, {}};
        const FairnessSpec f2_spec{FairnessKind::F2, config.w, {}};
        PlanResult plan;
        if (algorithm == "baseline") {
            plan = planner.solve_baseline(x0, f2_spec);
        } else if (algorithm == "fairfly-f1") {
            plan = planner.solve_fair(x0, f1_spec);
        } else if (algorithm == "fairfly-f2") {
            plan = planner.solve_fair(x0, f2_spec);
        } else if (algorithm == "fairfly-f2imb") {
            FairnessSpec spec = scenario.fairness;
            spec.kind = FairnessKind::F2Imb;
            spec.w = config.w;
            plan = planner.solve_fair(x0, spec);
        } else {
            throw std::invalid_argument("unknown algorithm '" + algorithm + "'");
        }
        row.tuple = plan.tuple;
        row.offline_ms = plan.timings.total_ms;
        row.inner_calls = plan.stats.inner_calls;
        row.dimension = plan.inner.dimension;
        if (!plan.feasible) {
            row.failure = "infeasible";
            return row;
        }
        row.robustness = plan.inner.robustness;
        const auto a = alpha_unchecked(plan.tuple, plan.box);
        row.fairness_f1 = f1_spec.score(a);
        row.fairness_f2 = f2_spec.score(a);
        if (config.online) {
            OnlineConfig oc;
            oc.seed = seed;
            oc.force_resolve = true;
            oc.max_iterations = 1;
            const OnlineRun run = simulate_online(planner, x0, plan, oc);
            row.online_first_ms = run.first_solve_ms;
        }
        row.ok = true;
    } catch (const std::exception& e) {
        row.ok = false;
        row.failure = e.what();
    }
    return row;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config, const ScenarioFactory& make) {
    const ScenarioFactory factory = make ? make : [](int d) { return desk_map(d); };
    struct Job {
        std::string algorithm;
        int uav_count;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int d : config.uav_counts) {
        for (const auto& a : config.algorithms) {
            for (int s = 0; s < config.seeds; ++s) {
                jobs.push_back({a, d, config.base_seed + static_cast<std::uint64_t>(s)});
            }
        }
    }
    std::vector<Scenario> scenarios;
    for (int d : config.uav_counts) {
        scenarios.push_back(factory(d));
    }
    auto scenario_for = [&](int d) -> const Scenario& {
        for (std::size_t i = 0; i < config.uav_counts.size(); ++i) {
            if (config.uav_counts[i] == d) {
                return scenarios[i];
            }
        }
        throw std::logic_error("missing scenario");
    };

    BenchmarkReport report;
    report.rows.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            report.rows[i] = run_one(jobs[i].algorithm, scenario_for(jobs[i].uav_count), jobs[i].seed, config);
        }
    };
    const int threads = std::max(1, config.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    for (int d : config.uav_counts) {
        for (const auto& a : config.algorithms) {
            BenchmarkCell c;
            c.algorithm = a;
            c.uav_count = d;
            for (const auto& r : report.rows) {
                if (r.algorithm != a || r.uav_count != d) {
                    continue;
                }
                if (!r.ok) {
                    ++c.failures;
                    continue;
                }
                ++c.samples;
                c.robustness += r.robustness;
                c.fairness_f1 += r.fairness_f1;
                c.fairness_f2 += r.fairness_f2;
                c.offline_ms += r.offline_ms;
                c.online_first_ms += r.online_first_ms;
            }
            if (c.samples > 0) {
                const double n = c.samples;
                c.robustness /= n;
                c.fairness_f1 /= n;
                c.fairness_f2 /= n;
                c.offline_ms /= n;
                c.online_first_ms /= n;
            }
            report.cells.push_back(c);
        }
    }
    return report;
}

void write_benchmark_csv(std::ostream& out, const BenchmarkReport& report) {
    out << "algorithm,D,seed,robustness,fairness_f1,fairness_f2,offline_ms,online_first_ms,ok,inner_calls,dimension,"
           "tuple,failure\n";
    out << std::setprecision(10);
    for (const auto& r : report.rows) {
        std::string tuple;
        for (std::size_t i = 0; i < r.tuple.size(); ++i) {
            tuple += (i ? " " : "") + std::to_string(r.tuple[i]);
        }
        std::string failure = r.failure;
        for (char& ch : failure) {
            if (ch == ',' || ch == '\n') {
                ch = ';';
            }
        }
        out << r.algorithm << ',' << r.uav_count << ',' << r.seed << ',' << r.robustness << ',' << r.fairness_f1 << ','
            << r.fairness_f2 << ',' << r.offline_ms << ',' << r.online_first_ms << ',' << (r.ok ? 1 : 0) << ','
            << r.inner_calls << ',' << r.dimension << ',' << tuple << ',' << failure << '\n';
    }
}

} // namespace fairfly
