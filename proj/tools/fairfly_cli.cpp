// fairfly command-line front end.
// Exit codes: 0 success, 1 error, 2 scenario infeasible.

#include "fairfly/benchmark.hpp"
#include "fairfly/io.hpp"
#include "fairfly/online.hpp"
#include "fairfly/planner.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace fairfly;

namespace {

constexpr const char* kFooter = R"(Formula grammar:
  atoms      in(uN, REGION)  out(uN, REGION)  sep(uN, uM, s)  hs(uN, a1, .., ad, b)  true  false
  operators  ! & | ->  F[a,b] G[a,b]  phi U[a,b] psi  ( )
Scenario JSON: version, name, model{order,dim,dt,u_max,v_max}, regions{NAME:{lo,hi}},
  goals[], takeoff[], obstacles[], separation, horizons[], mission (optional STL), fairness{kind,w,v}
Trace CSV: uav,k,x1..xd with 1-based uav ids.)";

int thread_count(int flag) {
    if (flag > 0) {
        return flag;
    }
    if (const char* env = std::getenv("FAIRFLY_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    return 1;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trace_csv(const stl::Trace& trace) {
    std::ostringstream out;
    stl::write_trace_csv(out, trace);
    return out.str();
}

FairnessSpec fairness_from_flags(const std::string& kind, double w, const std::vector<double>& v,
                                 const Scenario& scenario) {
    FairnessSpec spec = scenario.fairness;
    spec.kind = parse_fairness_kind(kind);
    spec.w = w;
    if (!v.empty()) {
        spec.v = v;
    }
    if (spec.kind == FairnessKind::F2Imb && spec.v.empty()) {
        spec.v.assign(scenario.uav_count(), 1.0);
    }
    return spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fair multi-UAV planning against STL missions"};
    app.footer(kFooter);
    app.require_subcommand(1);

    // monitor
    auto* monitor = app.add_subcommand("monitor", "robustness and verdict of a formula on a trace");
    std::string formula_path, formula_text, trace_path, monitor_scenario;
    double dt = 1.0;
    int at = 0;
    bool monitor_json = false;
    auto* formula_opt = monitor->add_option("--formula", formula_path, "file holding the formula");
    monitor->add_option("--formula-text", formula_text, "formula given inline")->excludes(formula_opt);
    monitor->add_option("--trace", trace_path, "trace CSV")->required();
    monitor->add_option("--scenario", monitor_scenario, "scenario JSON supplying regions and fleet size");
    monitor->add_option("--dt", dt, "seconds per step");
    monitor->add_option("--t", at, "evaluation time index");
    monitor->add_flag("--json", monitor_json, "print JSON");

    // plan
    auto* plan = app.add_subcommand("plan", "solve the fair control problem for a scenario");
    std::string scenario_path, fairness = "f2", out_path, trace_out;
    double w = 0.75;
    std::vector<double> v;
    std::uint64_t seed = 0;
    int threads = 0;
    bool baseline = false, quiet = false, as_json = false;
    plan->add_option("--scenario", scenario_path, "scenario JSON")->required();
    plan->add_option("--fairness", fairness, "f1, f2 or f2imb");
    plan->add_option("--w", w, "fairness weight in (0, 1]");
    plan->add_option("--v", v, "f2imb weights, one per UAV");
    plan->add_option("--seed", seed, "seed for the initial state and restarts");
    plan->add_option("--threads", threads, "restart threads (default FAIRFLY_THREADS or 1)");
    plan->add_flag("--baseline", baseline, "plan every UAV for the full mission horizon");
    plan->add_option("--out", out_path, "PlanResult JSON path");
    plan->add_option("--trace-out", trace_out, "planned trace CSV path");
    plan->add_flag("--quiet", quiet, "no summary on stdout");
    plan->add_flag("--json", as_json, "print the PlanResult JSON on stdout");

    // online
    auto* online = app.add_subcommand("online", "shrinking-horizon execution of a plan");
    std::string online_scenario, plan_path, online_out, online_trace;
    double noise = 0.0;
    std::uint64_t online_seed = 0;
    int online_threads = 0;
    bool online_quiet = false, online_json = false;
    online->add_option("--scenario", online_scenario, "scenario JSON")->required();
    online->add_option("--plan", plan_path, "PlanResult JSON from `plan` (solved with f2 otherwise)");
    online->add_option("--noise", noise, "position noise radius per step, metres");
    online->add_option("--seed", online_seed, "seed for the noise (and the plan when solved here)");
    online->add_option("--threads", online_threads, "restart threads");
    online->add_option("--out", online_out, "OnlineRun JSON path");
    online->add_option("--trace-out", online_trace, "executed trace CSV path");
    online->add_flag("--quiet", online_quiet, "no summary on stdout");
    online->add_flag("--json", online_json, "print the OnlineRun JSON on stdout");

    // bench
    auto* bench = app.add_subcommand("bench", "baseline vs FairFly over seeded initial states");
    std::string config_path, csv_out, report_out;
    int seeds = 0, bench_threads = 0;
    bench->add_option("--config", config_path, "benchmark config JSON");
    bench->add_option("--seeds", seeds, "initial states per cell (default 20)");
    bench->add_option("--threads", bench_threads, "concurrent runs");
    bench->add_option("--out", csv_out, "per-run CSV path");
    bench->add_option("--report", report_out, "report JSON path (input for plot-data)");

    // plot-data
    auto* plot = app.add_subcommand("plot-data", "figure series from a benchmark report");
    std::string plot_in, plot_out;
    plot->add_option("--report", plot_in, "report JSON from `bench`")->required();
    plot->add_option("--out", plot_out, "plot-data JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code != 0) {
            std::cerr << '\n' << kFooter << '\n';
        }
        return code;
    }

    try {
        if (*monitor) {
            stl::ParseContext ctx;
            std::ifstream trace_in(trace_path);
            if (!trace_in) {
                throw std::runtime_error("cannot open " + trace_path);
            }
            const stl::Trace trace = stl::read_trace_csv(trace_in, dt);
            if (!monitor_scenario.empty()) {
                ctx = load_scenario(monitor_scenario).context();
            } else {
                ctx.uav_count = trace.uav_count();
                ctx.dim = trace.dim();
            }
            const std::string text = formula_text.empty() ? slurp(formula_path) : formula_text;
            if (text.empty()) {
                throw std::invalid_argument("no formula given (use --formula or --formula-text)");
            }
            const stl::Formula f = stl::parse(text, ctx);
            const double rho = stl::robustness(f, trace, at);
            const bool sat = stl::satisfies(f, trace, at);
            if (monitor_json) {
                std::cout << Json{{"formula", stl::to_string(f, ctx)},
                                  {"robustness", rho},
                                  {"satisfied", sat},
                                  {"horizon", stl::hrz(f)}}
                                 .dump(2)
                          << '\n';
            } else {
                std::cout << "robustness " << rho << '\n' << (sat ? "SAT" : "UNSAT") << '\n';
            }
            return 0;
        }

        if (*plan) {
            const Scenario scenario = load_scenario(scenario_path);
            OptimizerConfig opt;
            opt.seed = seed;
            opt.threads = thread_count(threads);
            const Planner planner(scenario, opt);
            const FleetState x0 = sample_initial(scenario.takeoff_boxes(), seed);
            const FairnessSpec spec = fairness_from_flags(fairness, w, v, scenario);
            const PlanResult result = baseline ? planner.solve_baseline(x0, spec) : planner.solve_fair(x0, spec);
            const std::string json = to_json(result, x0).dump(2) + "\n";
            if (!out_path.empty()) {
                write_text_file(out_path, json);
            }
            if (as_json) {
                std::cout << json;
            }
            if (!trace_out.empty() && result.feasible) {
                emit(trace_out, trace_csv(result.inner.trace));
            }
            if (!quiet && !as_json) {
                std::cout << (result.feasible ? "feasible" : "infeasible") << " tuple <";
                for (std::size_t i = 0; i < result.tuple.size(); ++i) {
                    std::cout << (i ? "," : "") << result.tuple[i];
                }
                std::cout << "> fairness " << result.fairness << " robustness " << result.inner.robustness
                          << " inner calls " << result.stats.inner_calls << '\n';
            }
            if (!result.feasible) {
                if (!quiet) {
                    std::cerr << "scenario infeasible: no examined length tuple admits a plan with positive "
                                 "robustness\n";
                }
                return 2;
            }
            return 0;
        }

        if (*online) {
            const Scenario scenario = load_scenario(online_scenario);
            OptimizerConfig opt;
            opt.seed = online_seed;
            opt.threads = thread_count(online_threads);
            const Planner planner(scenario, opt);
            FleetState x0;
            PlanResult result;
            if (!plan_path.empty()) {
                result = plan_from_json(read_json_file(plan_path), &x0);
            } else {
                x0 = sample_initial(scenario.takeoff_boxes(), online_seed);
                result = planner.solve_fair(x0, scenario.fairness);
            }
            if (!result.feasible) {
                std::cerr << "scenario infeasible: nothing to execute\n";
                return 2;
            }
            OnlineConfig oc;
            oc.noise = noise;
            oc.seed = online_seed;
            const OnlineRun run = simulate_online(planner, x0, result, oc);
            const std::string json = to_json(run).dump(2) + "\n";
            if (!online_out.empty()) {
                write_text_file(online_out, json);
            }
            if (online_json) {
                std::cout << json;
            }
            if (!online_trace.empty()) {
                emit(online_trace, trace_csv(run.executed));
            }
            if (!online_quiet && !online_json) {
                std::cout << (run.satisfied ? "SAT" : "UNSAT") << " final robustness " << run.final_robustness
                          << " first re-solve " << run.first_solve_ms << " ms, violations " << run.violations
                          << '\n';
            }
            return 0;
        }

        if (*bench) {
            BenchmarkConfig config;
            if (!config_path.empty()) {
                config = benchmark_config_from_json(read_json_file(config_path));
            }
            if (seeds > 0) {
                config.seeds = seeds;
            }
            config.threads = thread_count(bench_threads > 0 ? bench_threads : config.threads);
            const BenchmarkReport report = run_benchmark(config);
            std::ostringstream csv;
            write_benchmark_csv(csv, report);
            emit(csv_out, csv.str());
            if (!report_out.empty()) {
                write_text_file(report_out, to_json(report).dump(2) + "\n");
            }
            if (!csv_out.empty()) {
                for (const auto& c : report.cells) {
                    std::cout << c.algorithm << " D=" << c.uav_count << " n=" << c.samples
                              << " robustness=" << c.robustness << " f1=" << c.fairness_f1 << " f2=" << c.fairness_f2
                              << " offline_ms=" << c.offline_ms << " online_first_ms=" << c.online_first_ms << '\n';
                }
            }
            return 0;
        }

        if (*plot) {
            const BenchmarkReport report = report_from_json(read_json_file(plot_in));
            emit(plot_out, plot_data(report).dump(2) + "\n");
            return 0;
        }
    } catch (const stl::ParseError& e) {
        std::cerr << "formula error at offset " << e.position() << ": " << e.what() << "\n\n" << kFooter << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
