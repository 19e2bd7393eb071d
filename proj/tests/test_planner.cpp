#include "doctest.h"
#include "support/oracles.hpp"
#include "support/scenarios.hpp"

#include "fairfly/planner.hpp"

#include <array>
#include <queue>
#include <set>

using namespace fairfly;
using namespace fairfly::testing;
using stl::Formula;

namespace {

stl::ParseContext two_uav_context() {
    stl::ParseContext ctx;
    ctx.uav_count = 2;
    ctx.dim = 2;
    ctx.regions["B"] = stl::Box{"B", {0, 0}, {1, 1}};
    return ctx;
}

FleetState start_of(const Scenario& s, std::uint64_t seed = 1) { return sample_initial(s.takeoff_boxes(), seed); }

// Coarse-grid search over joint positions in the corridor: can either UAV
// ever reach its goal while both stay in free space and more than s apart?
bool corridor_swap_possible(const Scenario& s) {
    const double h = 0.25;
    const double step = s.model.max_step();
    std::vector<double> xs, ys;
    for (double x = -2.75; x <= 2.75 + 1e-9; x += h) {
        xs.push_back(x);
    }
    for (double y = -0.25; y <= 0.25 + 1e-9; y += h) {
        ys.push_back(y);
    }
    const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
    const int per = nx * ny;
    auto pos = [&](int cell) { return std::array<double, 2>{xs[cell / ny], ys[cell % ny]}; };
    auto far_enough = [&](int a, int b) {
        const auto p = pos(a), q = pos(b);
        return std::hypot(p[0] - q[0], p[1] - q[1]) > s.separation;
    };
    auto in_region = [&](int cell, const std::string& name) {
        const auto p = pos(cell);
        const auto& r = s.region(name);
        return p[0] >= r.lo[0] && p[0] <= r.hi[0] && p[1] >= r.lo[1] && p[1] <= r.hi[1];
    };
    auto cell_of = [&](double x, double y) {
        int best = 0;
        double d = 1e300;
        for (int c = 0; c < per; ++c) {
            const auto p = pos(c);
            const double e = std::hypot(p[0] - x, p[1] - y);
            if (e < d) {
                d = e;
                best = c;
            }
        }
        return best;
    };
    std::vector<std::vector<int>> moves(per);
    for (int a = 0; a < per; ++a) {
        for (int b = 0; b < per; ++b) {
            const auto p = pos(a), q = pos(b);
            if (std::abs(p[0] - q[0]) <= step + 1e-9 && std::abs(p[1] - q[1]) <= step + 1e-9) {
                moves[a].push_back(b);
            }
        }
    }
    std::vector<char> seen(static_cast<std::size_t>(per) * per, 0);
    std::queue<std::pair<int, int>> todo;
    const int a0 = cell_of(-2, 0), b0 = cell_of(2, 0);
    todo.push({a0, b0});
    seen[a0 * per + b0] = 1;
    while (!todo.empty()) {
        const auto [a, b] = todo.front();
        todo.pop();
        if (in_region(a, "G1") || in_region(b, "G2")) {
            return true;
        }
        for (int na : moves[a]) {
            for (int nb : moves[b]) {
                if (!seen[na * per + nb] && far_enough(na, nb)) {
                    seen[na * per + nb] = 1;
                    todo.push({na, nb});
                }
            }
        }
    }
    return false;
}

} // namespace

TEST_CASE("truncate_mission examples") {
    const auto ctx = two_uav_context();
    SUBCASE("pairwise window clipped to the shorter UAV") {
        const Formula f = stl::parse("G[0,10](sep(u1, u2, 2))", ctx);
        const Formula t = truncate_mission(f, {3, 8});
        CHECK(t.interval() == stl::Interval{0, 3});
    }
    SUBCASE("full lengths leave the formula alone") {
        const Formula f = stl::parse("F[0,5](in(u1, B)) & G[2,6](!in(u2, B)) & (in(u1,B) U[1,4] in(u2,B))", ctx);
        CHECK(stl::to_string(truncate_mission(f, {stl::hrz(f), stl::hrz(f)})) == stl::to_string(f));
    }
    SUBCASE("goal reach with one step") {
        const Formula f = stl::parse("F[0,5](in(u2, B))", ctx);
        CHECK(truncate_mission(f, {7, 1}).interval() == stl::Interval{0, 1});
    }
    SUBCASE("nested windows account for the outer offset") {
        const Formula f = stl::parse("F[2,4](G[0,3](in(u1, B)))", ctx);
        const Formula t = truncate_mission(f, {5, 0});
        CHECK(t.interval() == stl::Interval{2, 4});
        CHECK(t.child().interval() == stl::Interval{0, 3});
    }
    SUBCASE("fleet too small") {
        CHECK_THROWS(truncate_mission(stl::parse("F[0,5](in(u2, B))", ctx), {3}));
    }
}

TEST_CASE("truncate_mission preserves robustness on traces of those lengths") {
    std::mt19937_64 rng(17);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int uavs = 1 + static_cast<int>(rng() % 3);
        const Formula f = normalize_nnf(random_formula(rng, 3, uavs, 2));
        const int h = stl::hrz(f);
        LengthTuple lengths(uavs);
        std::vector<std::vector<double>> pos(uavs);
        std::uniform_real_distribution<double> coord(-3.0, 3.0);
        for (int n = 0; n < uavs; ++n) {
            lengths[n] = static_cast<int>(rng() % (h + 2));
            pos[n].resize(static_cast<std::size_t>(lengths[n] + 1) * 2);
            for (auto& x : pos[n]) {
                x = coord(rng);
            }
        }
        const stl::Trace trace(0.5, 2, std::move(pos));
        const Formula t = truncate_mission(f, lengths);
        CHECK(stl::robustness(t, trace) == doctest::Approx(stl::robustness(f, trace)).epsilon(1e-12));
        CHECK(stl::hrz(t) <= h);
        CHECK(t.uavs() == f.uavs());
        ++checked;
    }
    CHECK(checked == 400);
}

TEST_CASE("robustness_bounds encloses every trace in the reachable boxes") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int uavs = 1 + static_cast<int>(rng() % 2);
        const Formula f = normalize_nnf(random_formula(rng, 3, uavs, 2));
        std::vector<std::vector<stl::Box>> reach(uavs);
        for (auto& per : reach) {
            const int len = static_cast<int>(rng() % 6);
            for (int k = 0; k <= len; ++k) {
                const double cx = 4 * u(rng) - 2, cy = 4 * u(rng) - 2, w = u(rng);
                per.push_back(stl::Box{"", {cx - w, cy - w}, {cx + w, cy + w}});
            }
        }
        const auto bounds = stl::robustness_bounds(f, reach);
        CHECK(bounds.lo <= bounds.hi);
        for (int sample = 0; sample < 30; ++sample) {
            std::vector<std::vector<double>> pos(uavs);
            for (int n = 0; n < uavs; ++n) {
                for (const auto& b : reach[n]) {
                    for (int a = 0; a < 2; ++a) {
                        pos[n].push_back(b.lo[a] + (b.hi[a] - b.lo[a]) * u(rng));
                    }
                }
            }
            const double rho = stl::robustness(f, stl::Trace(0.5, 2, std::move(pos)));
            CHECK(rho >= bounds.lo - 1e-9);
            CHECK(rho <= bounds.hi + 1e-9);
        }
    }
}

TEST_CASE("inner_maximize examples") {
    SUBCASE("goal around the start, no steps") {
        const Planner planner(trivial_goal());
        const FleetState x0 = start_of(planner.scenario());
        const InnerResult r = planner.inner_maximize(x0, {0});
        CHECK(r.feasible);
        CHECK(r.dimension == 0);
        // distance from (0,0) to the boundary of [-1,2]x[-1,3]
        CHECK(r.robustness == doctest::Approx(1.0));
    }
    SUBCASE("goal out of reach") {
        const Planner planner(distant_goal());
        const InnerResult r = planner.inner_maximize(start_of(planner.scenario()), {5});
        CHECK_FALSE(r.feasible);
        CHECK(r.screened);
        CHECK(r.robustness < 0.0);
    }
    SUBCASE("goal out of reach without the screen") {
        OptimizerConfig cfg;
        cfg.screen = false;
        cfg.max_iterations = 100;
        const Planner planner(distant_goal(), cfg);
        const InnerResult r = planner.inner_maximize(start_of(planner.scenario()), {5});
        CHECK_FALSE(r.feasible);
        CHECK_FALSE(r.screened);
        CHECK(r.dimension == 10);
    }
    SUBCASE("decision dimension counts every scalar input") {
        const Planner planner(corridor_swap(4));
        const InnerResult r = planner.inner_maximize(start_of(planner.scenario()), {3, 1});
        CHECK(r.dimension == 8);
        CHECK(r.plan[0].size() == 6);
        CHECK(r.plan[1].size() == 2);
        CHECK(r.trace.length(0) == 3);
        CHECK(r.trace.length(1) == 1);
    }
    SUBCASE("bad tuples") {
        const Planner planner(trivial_goal());
        CHECK_THROWS(planner.inner_maximize(start_of(planner.scenario()), {-1}));
        CHECK_THROWS(planner.inner_maximize(start_of(planner.scenario()), {1, 1}));
    }
}

TEST_CASE("corridor swap is impossible") {
    const Scenario s = corridor_swap(12);
    REQUIRE_FALSE(corridor_swap_possible(s));
    OptimizerConfig cfg;
    cfg.restarts = 6;
    const Planner planner(s, cfg);
    const FleetState x0 = start_of(s);
    for (const LengthTuple& l : {LengthTuple{4, 4}, LengthTuple{8, 8}, LengthTuple{12, 12}, LengthTuple{12, 6}}) {
        const InnerResult r = planner.inner_maximize(x0, l);
        CHECK_FALSE(r.feasible);
    }
    // one UAV alone reaches its goal easily, so the failure is the swap
    CHECK(planner.inner_maximize(x0, {0, 0}).robustness < 0.0);
}

TEST_CASE("inner results are reproducible and thread-count independent") {
    const Scenario s = random_pair(3);
    OptimizerConfig cfg;
    cfg.seed = 11;
    const Planner serial(s, cfg);
    cfg.threads = 3;
    const Planner parallel(s, cfg);
    const FleetState x0 = start_of(s);
    const LengthTuple l = serial.box().hi;
    const InnerResult a = serial.inner_maximize(x0, l);
    const InnerResult b = serial.inner_maximize(x0, l);
    const InnerResult c = parallel.inner_maximize(x0, l);
    CHECK(a.plan == b.plan);
    CHECK(a.plan == c.plan);
    CHECK(a.robustness == c.robustness);
}

TEST_CASE("solve_fair and solve_baseline on seeded pairs") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Scenario s = random_pair(seed);
        OptimizerConfig cfg;
        cfg.seed = seed;
        const Planner planner(s, cfg);
        const FleetState x0 = start_of(s, seed);
        const FairnessSpec f2{FairnessKind::F2, 0.75, {}};
        const PlanResult fair = planner.solve_fair(x0, f2);
        const PlanResult base = planner.solve_baseline(x0, f2);
        INFO("seed " << seed);
        REQUIRE(fair.feasible);
        REQUIRE(base.feasible);

        for (const PlanResult* p : {&fair, &base}) {
            CHECK(p->inner.robustness > 0.0);
            const stl::Trace t = rollout(s.model, x0, p->inner.plan);
            CHECK(stl::satisfies(planner.mission(), t));
            CHECK(brute_force_satisfies(planner.mission(), t));
            CHECK(stl::robustness(planner.mission(), t) == doctest::Approx(p->inner.robustness).epsilon(1e-9));
            CHECK(min_pair_distance(t) > s.separation);
            for (int n = 0; n < 2; ++n) {
                CHECK(t.length(n) == p->tuple[n]);
            }
        }
        CHECK(fair.fairness == doctest::Approx(f2.score(alpha(fair.tuple, fair.box))));
        CHECK(fair.box.contains(fair.tuple));
        CHECK_FALSE(fair.frontier.is_pruned_infeasible(fair.tuple));

        const int h = stl::hrz(planner.mission());
        CHECK(base.tuple == LengthTuple{h, h});
        CHECK(base.inner.dimension >= fair.inner.dimension);
        CHECK(fair.fairness >= base.fairness);
        CHECK(fair.stats.examined >= 1);
        CHECK(fair.stats.inner_calls + fair.stats.screened == fair.stats.examined);
    }
}

TEST_CASE("f1 only checks the hi tuple") {
    const Scenario s = random_pair(2);
    const Planner planner(s);
    const PlanResult r = planner.solve_fair(start_of(s), FairnessSpec{FairnessKind::F1, 0.75, {}});
    CHECK(r.stats.examined == 1);
    CHECK(r.stats.random_probes == 0);
    REQUIRE(r.feasible);
    CHECK(r.tuple == planner.box().hi);
    CHECK(r.fairness == doctest::Approx(0.0));
}

TEST_CASE("one UAV: baseline and f1 agree") {
    Scenario s = trivial_goal(6);
    add_region(s, box2("G1", 3, -0.5, 4, 0.5));
    const Planner planner(s);
    const FleetState x0 = start_of(s);
    const PlanResult fair = planner.solve_fair(x0, FairnessSpec{FairnessKind::F1, 0.75, {}});
    const PlanResult base = planner.solve_baseline(x0, FairnessSpec{FairnessKind::F1, 0.75, {}});
    REQUIRE(fair.feasible);
    REQUIRE(base.feasible);
    CHECK(fair.tuple == base.tuple);
}

TEST_CASE("an impossible swap gives an infeasible result with the frontier") {
    Scenario s = corridor_swap(6);
    const Planner planner(s);
    const PlanResult r = planner.solve_fair(start_of(s), FairnessSpec{});
    CHECK_FALSE(r.feasible);
    CHECK_FALSE(r.frontier.has_feasible());
    CHECK(r.stats.examined > 0);
    // every box tuple is either examined or pruned by an infeasible record
    LengthTuple l = r.box.lo;
    for (int a = r.box.lo[0]; a <= r.box.hi[0]; ++a) {
        for (int b = r.box.lo[1]; b <= r.box.hi[1]; ++b) {
            l = {a, b};
            CHECK(r.frontier.is_pruned_infeasible(l));
        }
    }
}

TEST_CASE("pruned search matches exhaustive search on small pairs") {
    for (std::uint64_t seed = 100; seed < 104; ++seed) {
        const Scenario s = random_pair(seed);
        // infeasible verdicts are budget-relative, so both sides get the large budget
        const Planner reference(s, enlarged_budget(seed));
        const Planner planner(s, enlarged_budget(seed));
        const FleetState x0 = start_of(s, seed);
        const FairnessSpec spec{FairnessKind::F2, 0.75, {}};
        const ExhaustiveResult ex = exhaustive_search(reference, x0, spec);
        const long before = planner.inner_invocations();
        const PlanResult r = planner.solve_fair(x0, spec);
        const long calls = planner.inner_invocations() - before;
        INFO("seed " << seed);
        REQUIRE(ex.feasible);
        REQUIRE(r.feasible);
        CHECK(r.fairness == doctest::Approx(ex.fairness).epsilon(1e-12));
        CHECK(calls < ex.inner_calls);

        // dominance soundness and monotone feasibility on the reference verdicts
        for (const auto& [l, ok] : ex.verdicts) {
            if (ok) {
                continue;
            }
            for (const auto& [m, ok2] : ex.verdicts) {
                if (m[0] <= l[0] && m[1] <= l[1]) {
                    CHECK_FALSE(ok2);
                }
            }
        }
    }
}

TEST_CASE("planner configuration checks") {
    OptimizerConfig cfg;
    cfg.restarts = 0;
    CHECK_THROWS(Planner(trivial_goal(), cfg));
    Scenario bad = trivial_goal();
    bad.takeoff = {"nowhere"};
    CHECK_THROWS(Planner(bad));
    const Planner planner(trivial_goal());
    CHECK_THROWS(planner.solve_fair(start_of(planner.scenario()), FairnessSpec{FairnessKind::F2, 2.0, {}}));
}
