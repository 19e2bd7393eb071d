#include "doctest.h"
#include "support/oracles.hpp"
#include "support/scenarios.hpp"

#include "fairfly/online.hpp"

using namespace fairfly;
using namespace fairfly::testing;

namespace {

// Offline plan for an explicit tuple, bypassing the outer search.
PlanResult plan_for(const Planner& planner, const FleetState& x0, const LengthTuple& tuple) {
    PlanResult p;
    p.algorithm = "fixed";
    p.tuple = tuple;
    p.box = planner.box();
    InnerOptions opts;
    opts.early_exit = false;
    p.inner = planner.inner_maximize(x0, tuple, opts);
    p.feasible = p.inner.feasible;
    return p;
}

struct Fixture {
    Scenario scenario = random_pair(5);
    Planner planner{scenario, [] {
                        OptimizerConfig c;
                        c.seed = 5;
                        return c;
                    }()};
    FleetState x0 = sample_initial(scenario.takeoff_boxes(), 5);
};

} // namespace

TEST_CASE("zero noise replays the offline plan") {
    Fixture fx;
    const PlanResult plan = fx.planner.solve_fair(fx.x0, FairnessSpec{});
    REQUIRE(plan.feasible);
    const OnlineRun run = simulate_online(fx.planner, fx.x0, plan, OnlineConfig{});
    const stl::Trace offline = rollout(fx.scenario.model, fx.x0, plan.inner.plan);
    for (int n = 0; n < 2; ++n) {
        REQUIRE(run.executed.length(n) == plan.tuple[n]);
        for (int k = 0; k <= plan.tuple[n]; ++k) {
            const auto a = run.executed.at(n, k), b = offline.at(n, k);
            for (std::size_t i = 0; i < a.size(); ++i) {
                CHECK(std::abs(a[i] - b[i]) < 1e-6);
            }
        }
    }
    CHECK(run.satisfied);
    CHECK(run.violations == 0);
    CHECK(run.final_robustness == doctest::Approx(plan.inner.robustness).epsilon(1e-6));
    CHECK(run.offline_robustness == plan.inner.robustness);
    for (const auto& it : run.iterations) {
        CHECK_FALSE(it.resolved); // the shifted plan keeps its promise
    }
}

TEST_CASE("re-solve dimension shrinks by one step per flying UAV") {
    Fixture fx;
    const PlanResult plan = plan_for(fx.planner, fx.x0, fx.planner.box().hi);
    REQUIRE(plan.feasible);
    OnlineConfig cfg;
    cfg.force_resolve = true;
    const OnlineRun run = simulate_online(fx.planner, fx.x0, plan, cfg);
    REQUIRE_FALSE(run.iterations.empty());
    const int dim = fx.scenario.model.dim;
    CHECK(run.iterations.front().dimension == plan.inner.dimension - dim * 2);
    int prev = plan.inner.dimension;
    for (const auto& it : run.iterations) {
        CHECK(it.dimension < prev);
        CHECK(it.resolved);
        int expected = 0;
        for (int l : plan.tuple) {
            expected += std::max(l - it.k, 0) * dim;
        }
        CHECK(it.dimension == expected);
        prev = it.dimension;
    }
    CHECK(run.first_solve_ms == run.iterations.front().solve_ms);
    CHECK(static_cast<int>(run.iterations.size()) == std::max(plan.tuple[0], plan.tuple[1]) - 1);
}

TEST_CASE("landed UAVs carry no decision variables") {
    Fixture fx;
    const LengthTuple hi = fx.planner.box().hi;
    const PlanResult plan = plan_for(fx.planner, fx.x0, hi);
    REQUIRE(plan.feasible);
    // UAV 1 has landed, UAV 2 still has steps
    History history;
    const stl::Trace& t = plan.inner.trace;
    history.prefix = {t.samples(0), {}};
    history.prefix[0].resize(t.samples(0).size() - 2);
    FleetState state = fx.x0;
    state.pos[0] = {t.at(0, hi[0])[0], t.at(0, hi[0])[1]};
    const StepOutcome out = online_step(fx.planner, state, history, {0, hi[1]}, InputPlan{{}, plan.inner.plan[1]},
                                        plan.inner.robustness, OnlineConfig{}, 3);
    CHECK(out.inner.dimension == hi[1] * 2);
    CHECK(out.first_inputs[0].empty());
    CHECK(out.first_inputs[1].size() == 2);
    CHECK(out.plan[0].empty());
    CHECK_THROWS(online_step(fx.planner, state, history, {-1, 1}, InputPlan(2), 0.0, OnlineConfig{}, 3));
}

TEST_CASE("noise below the offline robustness keeps the mission satisfied") {
    Fixture fx;
    const PlanResult plan = fx.planner.solve_fair(fx.x0, FairnessSpec{});
    REQUIRE(plan.feasible);
    REQUIRE(plan.inner.robustness > 0.1);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        OnlineConfig cfg;
        cfg.noise = 0.5 * plan.inner.robustness;
        cfg.seed = seed;
        const OnlineRun run = simulate_online(fx.planner, fx.x0, plan, cfg);
        INFO("seed " << seed);
        CHECK(run.satisfied);
        CHECK(brute_force_satisfies(fx.planner.mission(), run.executed));
        CHECK(min_pair_distance(run.executed) > fx.scenario.separation);
    }
}

TEST_CASE("online runs are reproducible") {
    Fixture fx;
    const PlanResult plan = fx.planner.solve_fair(fx.x0, FairnessSpec{});
    REQUIRE(plan.feasible);
    OnlineConfig cfg;
    cfg.noise = 0.2;
    cfg.seed = 9;
    const OnlineRun a = simulate_online(fx.planner, fx.x0, plan, cfg);
    const OnlineRun b = simulate_online(fx.planner, fx.x0, plan, cfg);
    for (int n = 0; n < 2; ++n) {
        CHECK(a.executed.samples(n) == b.executed.samples(n));
    }
    cfg.seed = 10;
    const OnlineRun c = simulate_online(fx.planner, fx.x0, plan, cfg);
    CHECK(a.executed.samples(0) != c.executed.samples(0));
}

TEST_CASE("iteration cap and infeasible input") {
    Fixture fx;
    const PlanResult plan = plan_for(fx.planner, fx.x0, fx.planner.box().hi);
    OnlineConfig cfg;
    cfg.max_iterations = 1;
    const OnlineRun run = simulate_online(fx.planner, fx.x0, plan, cfg);
    CHECK(run.iterations.size() == 1);
    CHECK_FALSE(run.satisfied); // the trace stops early, so no verdict

    PlanResult bad = plan;
    bad.feasible = false;
    CHECK_THROWS(simulate_online(fx.planner, fx.x0, bad, OnlineConfig{}));
}
