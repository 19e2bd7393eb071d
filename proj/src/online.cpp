#include "fairfly/online.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fairfly {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> ball_noise(std::mt19937_64& rng, int dim, double radius) {
    std::vector<double> v(dim, 0.0);
    if (radius <= 0.0) {
        return v;
    }
    std::normal_distribution<double> gauss;
    double norm = 0.0;
    while (norm < 1e-12) {
        norm = 0.0;
        for (auto& x : v) {
            x = gauss(rng);
            norm += x * x;
        }
        norm = std::sqrt(norm);
    }
    const double r = radius * std::pow(std::uniform_real_distribution<double>(0.0, 1.0)(rng), 1.0 / dim);
    for (auto& x : v) {
        x *= r / norm;
    }
    return v;
}

} // namespace

StepOutcome online_step(const Planner& planner, const FleetState& state, const History& history,
                        const LengthTuple& remaining, const InputPlan& warm_start, double promised,
                        const OnlineConfig& config, std::uint64_t seed) {
    const int dim = planner.scenario().model.dim;
    for (int r : remaining) {
        if (r < 0) {
            throw std::invalid_argument("remaining steps must be non-negative");
        }
    }
    StepOutcome out;
    InnerOptions keep;
    keep.warm_start = &warm_start;
    keep.history = &history;
    keep.restarts = 1;
    keep.max_iterations = 0;
    keep.early_exit = false;
    keep.seed = seed;
    if (!config.force_resolve) {
        out.inner = planner.inner_maximize(state, remaining, keep);
    }
    if (config.force_resolve || out.inner.robustness < promised - 1e-9) {
        InnerOptions opts;
        opts.warm_start = &warm_start;
        opts.history = &history;
        opts.restarts = 1 + std::max(0, config.extra_restarts);
        opts.early_exit = false;
        opts.seed = seed;
        out.inner = planner.inner_maximize(state, remaining, opts);
        out.resolved = true;
    }
    out.plan = out.inner.plan;
    out.first_inputs.resize(remaining.size());
    for (std::size_t n = 0; n < remaining.size(); ++n) {
        if (remaining[n] > 0) {
            out.first_inputs[n].assign(out.plan[n].begin(), out.plan[n].begin() + dim);
        }
    }
    return out;
}

OnlineRun simulate_online(const Planner& planner, const FleetState& x0, const PlanResult& plan,
                          const OnlineConfig& config) {
    if (!plan.feasible) {
        throw std::invalid_argument("simulate_online needs a feasible plan");
    }
    const UavModel& model = planner.scenario().model;
    const int dim = model.dim;
    const int uavs = static_cast<int>(plan.tuple.size());
    OnlineRun run;
    run.noise = config.noise;
    run.seed = config.seed;
    run.offline_robustness = plan.inner.robustness;

    std::mt19937_64 rng(config.seed);
    FleetState state = x0;
    if (state.vel.empty()) {
        state.vel.assign(uavs, std::vector<double>(dim, 0.0));
    }
    std::vector<std::vector<double>> executed(uavs);
    for (int n = 0; n < uavs; ++n) {
        executed[n] = state.pos[n];
    }
    InputPlan inputs = plan.inner.plan;
    double promised = plan.inner.robustness;
    int max_length = 0;
    for (int l : plan.tuple) {
        max_length = std::max(max_length, l);
    }

    for (int k = 0; k < max_length; ++k) {
        LengthTuple remaining(uavs);
        for (int n = 0; n < uavs; ++n) {
            remaining[n] = std::max(plan.tuple[n] - k, 0);
        }
        if (k > 0) {
            if (config.max_iterations >= 0 && static_cast<int>(run.iterations.size()) >= config.max_iterations) {
                break;
            }
            History history;
            history.prefix.resize(uavs);
            for (int n = 0; n < uavs; ++n) {
                history.prefix[n].assign(executed[n].begin(), executed[n].end() - dim);
            }
            const auto start = Clock::now();
            StepOutcome step_out = online_step(planner, state, history, remaining, inputs, promised, config,
                                               config.seed * 1000003ULL + static_cast<std::uint64_t>(k));
            OnlineIteration it;
            it.k = k;
            it.solve_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
            it.dimension = step_out.inner.dimension;
            it.robustness = step_out.inner.robustness;
            it.resolved = step_out.resolved;
            it.violation = !(step_out.inner.robustness > 0.0);
            run.violations += it.violation ? 1 : 0;
            if (run.iterations.empty()) {
                run.first_solve_ms = it.solve_ms;
            }
            run.iterations.push_back(it);
            inputs = std::move(step_out.plan);
            promised = step_out.inner.robustness;
        }
        for (int n = 0; n < uavs; ++n) {
            if (remaining[n] == 0) {
                continue;
            }
            std::span<const double> u(inputs[n].data(), dim);
            step(model, state.pos[n], state.vel[n], u);
            const auto kick = ball_noise(rng, dim, config.noise);
            for (int a = 0; a < dim; ++a) {
                state.pos[n][a] += kick[a];
            }
            executed[n].insert(executed[n].end(), state.pos[n].begin(), state.pos[n].end());
            inputs[n].erase(inputs[n].begin(), inputs[n].begin() + dim);
        }
    }
    run.executed = stl::Trace(model.dt, dim, std::move(executed));
    const bool complete = [&] {
        for (int n = 0; n < uavs; ++n) {
            if (run.executed.length(n) != plan.tuple[n]) {
                return false;
            }
        }
        return true;
    }();
    if (complete) {
        run.satisfied = stl::satisfies(planner.mission(), run.executed);
        run.final_robustness = stl::robustness(planner.mission(), run.executed, 0, planner.config().eval);
    }
    return run;
}

} // namespace fairfly
