#include "fairfly/planner.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <thread>

namespace fairfly {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t restart_seed(std::uint64_t seed, const LengthTuple& steps, int index) {
    std::uint64_t h = splitmix(seed);
    for (int l : steps) {
        h = splitmix(h ^ static_cast<std::uint64_t>(l));
    }
    return splitmix(h ^ static_cast<std::uint64_t>(index));
}

int avail(const stl::Formula& f, const LengthTuple& lengths) {
    int end = INT_MAX;
    for (int u : f.uavs()) {
        end = std::min(end, lengths.at(u));
    }
    return end;
}

// `earliest` is the first time index at which f can be evaluated. Windows are
// clipped to what the truncated semantics would keep anyway; an interval is
// never emptied, so each node keeps its UAV set and hence its availability.
stl::Formula truncate(const stl::Formula& f, const LengthTuple& lengths, long long earliest) {
    using stl::Formula;
    using stl::Op;
    switch (f.op()) {
    case Op::True:
    case Op::Atom:
        return f;
    case Op::Not:
        return Formula::negate(truncate(f.child(), lengths, earliest));
    case Op::And:
    case Op::Or: {
        stl::FormulaList kids;
        for (const auto& c : f.children()) {
            kids.push_back(truncate(c, lengths, earliest));
        }
        return f.op() == Op::And ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
    }
    case Op::Eventually:
    case Op::Always:
    case Op::Until: {
        const stl::Formula& gate = f.op() == Op::Until ? f.child(1) : f;
        stl::Interval iv = f.interval();
        const long long room = static_cast<long long>(avail(gate, lengths)) - earliest;
        iv.hi = static_cast<int>(std::clamp<long long>(room, iv.lo, iv.hi));
        if (f.op() == Op::Until) {
            return Formula::until(iv, truncate(f.child(0), lengths, earliest + 1),
                                  truncate(f.child(1), lengths, earliest + iv.lo));
        }
        auto kid = truncate(f.child(), lengths, earliest + iv.lo);
        return f.op() == Op::Eventually ? Formula::eventually(iv, std::move(kid)) : Formula::always(iv, std::move(kid));
    }
    }
    return f;
}

// Scratch for one ascent; not shared between threads.
struct Workspace {
    const UavModel& model;
    const FleetState& x0;
    const History* history;
    stl::Evaluator evaluator;
    double kappa;
    stl::Trace rolled;
    stl::Trace trace;
    stl::SmoothResult smooth;
    std::vector<std::vector<double>> tail_grad;
    InputPlan grad;

    Workspace(const UavModel& m, const FleetState& x, const History* h, const stl::Formula& f, double k,
              stl::EvalOptions eval)
        : model(m), x0(x), history(h), evaluator(f, eval), kappa(k) {}

    void build(const InputPlan& u) {
        if (history == nullptr || history->prefix.empty()) {
            rollout_into(model, x0, u, trace);
            return;
        }
        rollout_into(model, x0, u, rolled);
        if (trace.uav_count() != rolled.uav_count()) {
            trace = rolled;
        }
        auto& out = trace.mutable_samples();
        for (int n = 0; n < rolled.uav_count(); ++n) {
            const auto& pre = history->prefix[n];
            const auto& tail = rolled.samples(n);
            out[n].resize(pre.size() + tail.size());
            std::copy(pre.begin(), pre.end(), out[n].begin());
            std::copy(tail.begin(), tail.end(), out[n].begin() + static_cast<std::ptrdiff_t>(pre.size()));
        }
    }

    double value(const InputPlan& u) {
        build(u);
        return evaluator.smooth_value(trace, 0, kappa);
    }

    double value_and_grad(const InputPlan& u) {
        build(u);
        evaluator.smooth(trace, 0, kappa, smooth);
        tail_grad.resize(smooth.gradient.size());
        for (std::size_t n = 0; n < smooth.gradient.size(); ++n) {
            const std::size_t skip =
                history == nullptr || history->prefix.empty() ? 0 : history->prefix[n].size();
            tail_grad[n].assign(smooth.gradient[n].begin() + static_cast<std::ptrdiff_t>(skip), smooth.gradient[n].end());
        }
        input_gradient(model, x0, u, tail_grad, grad);
        return smooth.value;
    }

    double exact() { return evaluator.robustness(trace, 0); }
};

struct AscentResult {
    InputPlan plan;
    double robustness = -stl::kDefaultBig;
    long iterations = 0;
};

AscentResult ascend(Workspace& ws, InputPlan u, int max_iterations, bool early_exit, double margin) {
    const double u_max = ws.model.u_max;
    AscentResult best;
    double f = ws.value_and_grad(u);
    best.plan = u;
    best.robustness = ws.exact();
    double eta = u_max;
    InputPlan trial = u;
    InputPlan grad = ws.grad;
    for (int it = 0; it < max_iterations; ++it) {
        if (early_exit && best.robustness > margin) {
            break;
        }
        bool accepted = false;
        double f_trial = f;
        for (int ls = 0; ls < 40; ++ls) {
            double ascent = 0.0;
            for (std::size_t n = 0; n < u.size(); ++n) {
                for (std::size_t i = 0; i < u[n].size(); ++i) {
                    trial[n][i] = std::clamp(u[n][i] + eta * grad[n][i], -u_max, u_max);
                    ascent += (trial[n][i] - u[n][i]) * grad[n][i];
                }
            }
            if (ascent <= 1e-14) {
                break; // projected gradient vanished
            }
            f_trial = ws.value(trial);
            if (f_trial >= f + 1e-4 * ascent) {
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) {
            break;
        }
        std::swap(u, trial);
        f = ws.value_and_grad(u);
        grad = ws.grad;
        ++best.iterations;
        const double exact = ws.exact();
        if (exact > best.robustness) {
            best.robustness = exact;
            best.plan = u;
        }
        eta = std::min(eta * 2.0, 4.0 * u_max);
    }
    return best;
}

std::vector<std::vector<stl::Box>> reach_with_history(const UavModel& model, const FleetState& x0,
                                                      const LengthTuple& steps, const History* history) {
    auto tail = reachable_boxes(model, x0, steps);
    if (history == nullptr || history->prefix.empty()) {
        return tail;
    }
    std::vector<std::vector<stl::Box>> out(tail.size());
    for (std::size_t n = 0; n < tail.size(); ++n) {
        const auto& pre = history->prefix[n];
        for (std::size_t k = 0; k * model.dim < pre.size(); ++k) {
            std::vector<double> p(pre.begin() + static_cast<std::ptrdiff_t>(k * model.dim),
                                  pre.begin() + static_cast<std::ptrdiff_t>((k + 1) * model.dim));
            out[n].push_back(stl::Box{"", p, p});
        }
        out[n].insert(out[n].end(), tail[n].begin(), tail[n].end());
    }
    return out;
}

} // namespace

stl::Formula truncate_mission(const stl::Formula& mission, const LengthTuple& lengths) {
    if (!mission.uavs().empty() && mission.uavs().back() >= static_cast<int>(lengths.size())) {
        throw std::invalid_argument("length tuple is shorter than the fleet the mission mentions");
    }
    return truncate(mission, lengths, 0);
}

Planner::Planner(Scenario scenario, OptimizerConfig config)
    : scenario_(std::move(scenario)), config_(std::move(config)) {
    scenario_.validate();
    mission_ = scenario_.global_mission();
    box_ = pl_bounds(mission_, scenario_.uav_count());
    if (config_.restarts < 1 || config_.max_iterations < 0 || !(config_.kappa > 0.0)) {
        throw std::invalid_argument("optimizer needs restarts >= 1, max_iterations >= 0 and kappa > 0");
    }
}

InnerResult Planner::inner_maximize(const FleetState& x0, const LengthTuple& steps, const InnerOptions& options) const {
    const auto start = Clock::now();
    ++invocations_;
    const UavModel& model = scenario_.model;
    const int dim = model.dim;
    const int uavs = scenario_.uav_count();
    if (static_cast<int>(steps.size()) != uavs || x0.uav_count() != uavs) {
        throw std::invalid_argument("inner_maximize: tuple or state does not match the fleet size");
    }
    LengthTuple lengths(uavs);
    for (int n = 0; n < uavs; ++n) {
        if (steps[n] < 0) {
            throw std::invalid_argument("inner_maximize: negative step count");
        }
        lengths[n] = steps[n] + (options.history ? options.history->steps(n, dim) : 0);
    }
    const stl::Formula formula = truncate_mission(mission_, lengths);

    InnerResult result;
    for (int l : steps) {
        result.dimension += l * dim;
    }
    InputPlan zero(uavs);
    for (int n = 0; n < uavs; ++n) {
        zero[n].assign(static_cast<std::size_t>(steps[n]) * dim, 0.0);
    }
    InputPlan first = zero;
    if (options.warm_start != nullptr) {
        for (int n = 0; n < uavs && n < static_cast<int>(options.warm_start->size()); ++n) {
            const auto& w = (*options.warm_start)[n];
            for (std::size_t i = 0; i < first[n].size() && i < w.size(); ++i) {
                first[n][i] = std::clamp(w[i], -model.u_max, model.u_max);
            }
        }
    }

    if (config_.screen) {
        const auto reach = reach_with_history(model, x0, steps, options.history);
        if (stl::robustness_bounds(formula, reach, 0, config_.eval).hi <= 0.0) {
            Workspace ws(model, x0, options.history, formula, config_.kappa, config_.eval);
            ws.build(first);
            result.plan = first;
            result.trace = ws.trace;
            result.robustness = ws.exact();
            result.screened = true;
            result.wall_ms = elapsed_ms(start);
            return result;
        }
    }

    const int restarts = options.restarts > 0 ? options.restarts : config_.restarts;
    const int iterations = options.max_iterations >= 0 ? options.max_iterations : config_.max_iterations;
    const std::uint64_t seed = options.seed != 0 ? options.seed : config_.seed;

    auto initial = [&](int index) {
        if (index == 0) {
            return first;
        }
        std::mt19937_64 rng(restart_seed(seed, steps, index));
        std::uniform_real_distribution<double> draw(-model.u_max, model.u_max);
        InputPlan u = zero;
        for (auto& seq : u) {
            for (auto& x : seq) {
                x = draw(rng);
            }
        }
        return u;
    };
    auto run = [&](int index) {
        Workspace ws(model, x0, options.history, formula, config_.kappa, config_.eval);
        return ascend(ws, initial(index), iterations, options.early_exit, config_.margin);
    };

    // The pick is "first restart whose robustness clears the margin, else the
    // best one", so running restarts in parallel cannot change the answer.
    std::vector<AscentResult> runs;
    const int threads = std::max(1, config_.threads);
    if (threads == 1 || restarts == 1) {
        for (int i = 0; i < restarts; ++i) {
            runs.push_back(run(i));
            if (options.early_exit && runs.back().robustness > config_.margin) {
                break;
            }
        }
    } else {
        runs.resize(restarts);
        for (int batch = 0; batch < restarts; batch += threads) {
            std::vector<std::thread> pool;
            for (int i = batch; i < std::min(restarts, batch + threads); ++i) {
                pool.emplace_back([&, i] { runs[i] = run(i); });
            }
            for (auto& t : pool) {
                t.join();
            }
            bool done = false;
            for (int i = batch; i < std::min(restarts, batch + threads); ++i) {
                done = done || (options.early_exit && runs[i].robustness > config_.margin);
            }
            if (done) {
                runs.resize(std::min(restarts, batch + threads));
                break;
            }
        }
    }
    std::size_t pick = 0;
    bool cleared = false;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        result.iterations += runs[i].iterations;
        if (options.early_exit && !cleared && runs[i].robustness > config_.margin) {
            pick = i;
            cleared = true;
        }
        if (!cleared && runs[i].robustness > runs[pick].robustness) {
            pick = i;
        }
    }
    result.restarts = static_cast<int>(runs.size());
    result.plan = std::move(runs[pick].plan);
    Workspace ws(model, x0, options.history, formula, config_.kappa, config_.eval);
    ws.build(result.plan);
    result.trace = ws.trace;
    result.robustness = ws.exact();
    result.feasible = result.robustness > 0.0;
    result.wall_ms = elapsed_ms(start);
    return result;
}

PlanResult Planner::solve_fair(const FleetState& x0, const FairnessSpec& spec) const {
    const auto start = Clock::now();
    spec.validate(scenario_.uav_count());
    PlanResult out;
    out.algorithm = "fairfly";
    out.box = box_;
    out.spec = spec;
    out.frontier = SearchFrontier(config_.prune);
    SearchFrontier& frontier = out.frontier;
    FairestFirst order(box_, spec, config_.enumeration_cap);
    std::mt19937_64 rng(splitmix(config_.seed ^ 0x5eedULL));
    std::map<LengthTuple, InnerResult> found;

    int outer = 0;
    while (true) {
        std::optional<LengthTuple> candidate;
        bool probe = false;
        if (spec.kind != FairnessKind::F1 && config_.random_every > 0 && outer > 0 &&
            outer % config_.random_every == 0) {
            candidate = sample_random(box_, frontier, rng);
            probe = candidate.has_value();
            if (probe && frontier.is_pruned_unfair(order.fairness(*candidate))) {
                ++frontier.pruned_fairness;
                ++outer;
                continue;
            }
        }
        if (!candidate) {
            candidate = order.next(frontier);
        }
        if (!candidate) {
            break;
        }
        ++outer;
        ++out.stats.examined;
        out.stats.random_probes += probe ? 1 : 0;
        InnerOptions opts;
        opts.restarts = probe ? std::max(1, config_.restarts / 2) : config_.restarts;
        InnerResult inner = inner_maximize(x0, *candidate, opts);
        out.stats.screened += inner.screened ? 1 : 0;
        out.stats.inner_calls += inner.screened ? 0 : 1;
        const double fair = order.fairness(*candidate);
        if (inner.feasible) {
            frontier.record_feasible(*candidate, fair);
            found[*candidate] = std::move(inner);
            if (!probe) {
                break; // nothing left in the order can beat it
            }
        } else {
            frontier.record_infeasible(*candidate);
            if (spec.kind == FairnessKind::F1) {
                break; // only the all-hi tuple is worth checking
            }
        }
    }
    out.stats.pruned_dominance = frontier.pruned_dominance;
    out.stats.pruned_fairness = frontier.pruned_fairness;
    out.timings.search_ms = elapsed_ms(start);

    if (frontier.has_feasible()) {
        out.feasible = true;
        out.tuple = frontier.best_tuple();
        out.fairness = frontier.best_fairness();
        out.alpha = alpha(out.tuple, box_);
        out.inner = std::move(found[out.tuple]);
        if (config_.polish) {
            const auto polish_start = Clock::now();
            InnerOptions opts;
            opts.warm_start = &out.inner.plan;
            opts.restarts = 1;
            opts.early_exit = false;
            InnerResult polished = inner_maximize(x0, out.tuple, opts);
            if (polished.robustness >= out.inner.robustness) {
                polished.iterations += out.inner.iterations;
                out.inner = std::move(polished);
            }
            out.timings.polish_ms = elapsed_ms(polish_start);
        }
    }
    out.timings.total_ms = elapsed_ms(start);
    return out;
}

PlanResult Planner::solve_baseline(const FleetState& x0, const FairnessSpec& spec) const {
    const auto start = Clock::now();
    spec.validate(scenario_.uav_count());
    PlanResult out;
    out.algorithm = "baseline";
    out.box = box_;
    out.spec = spec;
    out.tuple.assign(scenario_.uav_count(), stl::hrz(mission_));
    out.alpha = alpha_unchecked(out.tuple, box_);
    out.fairness = spec.score(out.alpha);
    out.inner = inner_maximize(x0, out.tuple);
    out.stats.examined = 1;
    out.stats.inner_calls = out.inner.screened ? 0 : 1;
    out.stats.screened = out.inner.screened ? 1 : 0;
    out.timings.search_ms = elapsed_ms(start);
    if (out.inner.feasible && config_.polish) {
        const auto polish_start = Clock::now();
        InnerOptions opts;
        opts.warm_start = &out.inner.plan;
        opts.restarts = 1;
        opts.early_exit = false;
        InnerResult polished = inner_maximize(x0, out.tuple, opts);
        if (polished.robustness >= out.inner.robustness) {
            polished.iterations += out.inner.iterations;
            out.inner = std::move(polished);
        }
        out.timings.polish_ms = elapsed_ms(polish_start);
    }
    out.feasible = out.inner.feasible;
    if (out.feasible) {
        out.frontier.mark_visited(out.tuple);
    }
    out.timings.total_ms = elapsed_ms(start);
    return out;
}

} // namespace fairfly
