#include "doctest.h"
#include "support/oracles.hpp"

#include "fairfly/stl.hpp"

#include <cmath>
#include <random>
#include <functional>
#include <sstream>

using namespace fairfly;
using stl::Formula;
using stl::Interval;

namespace {

stl::Trace line_trace(std::vector<double> xs) {
    // one UAV moving along the first axis of a 1-D space
    return stl::Trace(0.5, 1, {std::move(xs)});
}

stl::ParseContext example_context() {
    stl::ParseContext ctx;
    ctx.uav_count = 3;
    ctx.dim = 3;
    ctx.regions["P"] = stl::Box{"P", {0, 0, 0}, {1, 1, 1}};
    ctx.regions["B"] = stl::Box{"B", {5, 5, 0}, {6, 6, 1}};
    ctx.regions["Obs"] = stl::Box{"Obs", {2, 2, 0}, {3, 3, 5}};
    ctx.regions["Z1"] = stl::Box{"Z1", {-1, -1, 0}, {1, 1, 5}};
    ctx.predicates["p"] = stl::halfspace(0, {1, 0, 0}, 1.5);
    ctx.predicates["q"] = stl::halfspace(0, {0, 1, 0}, 0.0);
    return ctx;
}

} // namespace

TEST_CASE("parse builds the expected trees") {
    const auto ctx = example_context();

    SUBCASE("reach and avoid for one UAV") {
        const Formula f = stl::parse("F[0,10](in(u1,P)) & G[0,10](!in(u1,Obs))", ctx);
        REQUIRE(f.op() == stl::Op::And);
        REQUIRE(f.children().size() == 2);
        CHECK(f.child(0).op() == stl::Op::Eventually);
        CHECK(f.child(0).interval() == Interval{0, 10});
        CHECK(f.child(0).child().predicate().kind == stl::AtomKind::InBox);
        CHECK(f.child(0).child().predicate().box.name == "P");
        CHECK(f.child(1).op() == stl::Op::Always);
        CHECK(f.child(1).child().op() == stl::Op::Not);
        CHECK(f.uavs() == std::vector<int>{0});
    }
    SUBCASE("true") { CHECK(stl::parse("true", ctx).op() == stl::Op::True); }
    SUBCASE("nested temporal operators") {
        const Formula f = stl::parse("G[0,2](F[2,4](p))", ctx);
        CHECK(f.op() == stl::Op::Always);
        CHECK(f.child().op() == stl::Op::Eventually);
        CHECK(f.child().interval() == Interval{2, 4});
        CHECK(f.child().child().predicate().label == "p");
    }
    SUBCASE("until, implication and separation") {
        const Formula f = stl::parse("(!in(u2,Z1)) U[0,5] (!in(u3,Z1))", ctx);
        CHECK(f.op() == stl::Op::Until);
        CHECK(f.uavs() == std::vector<int>{1, 2});
        const Formula g = stl::parse("p -> G[0,10] sep(u1, u2, 1.5)", ctx);
        REQUIRE(g.op() == stl::Op::Or);
        CHECK(g.child(0).op() == stl::Op::Not);
        CHECK(g.child(1).child().predicate().offset == 1.5);
    }
    SUBCASE("halfspace takes one coefficient per axis plus an offset") {
        const Formula f = stl::parse("hs(u1, 1, 0, 0, -2.5)", ctx);
        CHECK(f.predicate().coeffs == std::vector<double>{1, 0, 0});
        CHECK(f.predicate().offset == -2.5);
    }
}

TEST_CASE("parse reports errors with positions") {
    const auto ctx = example_context();
    auto error_at = [&](const char* text) -> std::size_t {
        try {
            stl::parse(text, ctx);
        } catch (const stl::ParseError& e) {
            return e.position();
        }
        return std::string::npos;
    };
    CHECK(error_at("F[0,10](in(u1,P)") == 16);
    CHECK(error_at("F[0,10](in(u7,P))") == 11);  // unknown UAV
    CHECK(error_at("F[0,10](in(u1,Nowhere))") == 14);
    CHECK(error_at("F[5,2](p)") == 1);           // inverted interval
    CHECK(error_at("G[-1,2](p)") == 1);          // negative bound
    CHECK(error_at("p & & q") == 4);
    CHECK(error_at("p q") == 2);
    CHECK(error_at("hs(u1, 1, 2)") == 0);
    CHECK(error_at("sep(u1, u1, 2)") == 8);
    CHECK(error_at("F[0,1.5](p)") == 4);
}

TEST_CASE("pretty-printing round-trips through the parser") {
    const auto ctx = example_context();
    for (const char* text : {"F[0,10](in(u1,P)) & G[0,10](!in(u1,Obs))", "true", "false", "G[0,2](F[2,4](p))",
                             "((p & q) & !p) | (q U[1,3] out(u2, B))", "hs(u3, 0.1, -2, 3e-05, 7)",
                             "p -> (q -> sep(u1, u3, 2.25))"}) {
        const Formula f = stl::parse(text, ctx);
        const std::string printed = stl::to_string(f, ctx);
        CHECK_MESSAGE(stl::parse(printed, ctx) == f, printed);
    }

    std::mt19937_64 rng(11);
    stl::ParseContext rctx;
    rctx.uav_count = 3;
    rctx.dim = 2;
    rctx.regions["R"] = stl::Box{"R", {0, 0}, {1, 1}};
    for (int i = 0; i < 300; ++i) {
        const Formula f = testing::random_formula(rng, 3, 3, 2);
        const std::string printed = stl::to_string(f, rctx);
        // random boxes all share the name R but differ in geometry, so compare shapes
        const Formula back = stl::parse(printed, rctx);
        CHECK(stl::to_string(back, rctx) == printed);
        CHECK(stl::hrz(back) == stl::hrz(f));
        CHECK(back.size() == f.size());
    }
}

TEST_CASE("hrz follows the structural recursion") {
    const auto ctx = example_context();
    const Formula phi1 = stl::parse("F[0,10](in(u1,P)) & G[0,10](!in(u1,Obs))", ctx);
    CHECK(stl::hrz(phi1) == 10);
    CHECK(stl::hrz(phi1) + 1 == 11); // sample count
    CHECK(stl::hrz(stl::parse("G[0,2](F[2,4](p))", ctx)) == 6);
    CHECK(stl::hrz(stl::parse("p", ctx)) == 0);
    CHECK(stl::hrz(stl::parse("F[0,5](in(u2,B)) & G[0,5](!in(u2,Obs))", ctx)) == 5);
    CHECK(stl::hrz(stl::parse("(p U[1,3] F[0,4] q) | G[0,2] p", ctx)) == 7);
}

TEST_CASE("boolean and quantitative semantics on a 1-D trace") {
    // p: x >= 1.5 ; sigma = (0, 1, 2)
    const Formula p = Formula::atom(stl::halfspace(0, {1.0}, 1.5));
    const stl::Trace sigma = line_trace({0, 1, 2});
    const Formula ev = Formula::eventually({0, 2}, p);

    CHECK(stl::satisfies(ev, sigma, 0));
    CHECK(stl::robustness(ev, sigma, 0) == doctest::Approx(0.5));
    CHECK(stl::satisfies(Formula::truth(), sigma, 0));
    CHECK(stl::robustness(Formula::truth(), sigma, 0) == stl::kDefaultBig);
    CHECK(stl::robustness(Formula::negate(ev), sigma, 0) == -stl::robustness(ev, sigma, 0));

    // windows clip at the end of the trace
    CHECK_FALSE(stl::satisfies(Formula::eventually({3, 5}, p), sigma, 0));
    CHECK(stl::robustness(Formula::eventually({3, 5}, p), sigma, 0) == -stl::kDefaultBig);
    CHECK(stl::satisfies(Formula::always({3, 5}, Formula::negate(p)), sigma, 0));
    CHECK(stl::robustness(Formula::always({3, 5}, Formula::negate(p)), sigma, 0) == stl::kDefaultBig);

    // evaluation past the end of every referenced sequence is over empty windows
    CHECK_FALSE(stl::satisfies(ev, sigma, 7));
    CHECK(stl::satisfies(Formula::always({0, 2}, p), sigma, 7));

    // sentinel magnitude is configurable
    stl::EvalOptions opts;
    opts.big = 50.0;
    CHECK(stl::robustness(Formula::eventually({3, 5}, p), sigma, 0, opts) == -50.0);
}

TEST_CASE("until requires the left side strictly between now and the witness") {
    const Formula p = Formula::atom(stl::halfspace(0, {1.0}, 1.5)); // x >= 1.5
    const Formula q = Formula::atom(stl::halfspace(0, {1.0}, 2.5)); // x >= 2.5
    // x: 0 at t=0 (p false at t itself is allowed), then 2, 2, 3
    const stl::Trace sigma = line_trace({0, 2, 2, 3});
    const Formula u = Formula::until({0, 3}, p, q);
    CHECK(stl::satisfies(u, sigma, 0));
    CHECK(stl::robustness(u, sigma, 0) == doctest::Approx(0.5));
    // a dip of p before the witness breaks it
    const stl::Trace dip = line_trace({0, 2, 1, 3});
    CHECK_FALSE(stl::satisfies(u, dip, 0));
    CHECK(stl::robustness(u, dip, 0) < 0.0);
}

TEST_CASE("pairwise constraints only bind while both UAVs have samples") {
    // UAV 1 has samples k=0..3, UAV 2 k=0..8; they meet at k=5 only.
    std::vector<double> a, b;
    for (int k = 0; k <= 3; ++k) {
        a.insert(a.end(), {0.0, 0.0});
    }
    for (int k = 0; k <= 8; ++k) {
        b.insert(b.end(), {k == 5 ? 0.0 : 5.0, 0.0});
    }
    const stl::Trace far_apart(0.5, 2, {a, b});
    const Formula sep = Formula::always({0, 10}, Formula::atom(stl::separation(0, 1, 1.0)));
    CHECK(stl::satisfies(sep, far_apart, 0));
    CHECK(stl::robustness(sep, far_apart, 0) == doctest::Approx(4.0));

    // meeting at k = 3 is inside the shared window
    std::vector<double> c;
    for (int k = 0; k <= 8; ++k) {
        c.insert(c.end(), {k == 3 ? 0.5 : 5.0, 0.0});
    }
    const stl::Trace close(0.5, 2, {a, c});
    CHECK_FALSE(stl::satisfies(sep, close, 0));
    CHECK(stl::robustness(sep, close, 0) == doctest::Approx(-0.5));
}

TEST_CASE("formula referencing a UAV missing from the trace is rejected") {
    const Formula f = Formula::atom(stl::halfspace(2, {1.0}, 0.0));
    CHECK_THROWS_AS(stl::robustness(f, line_trace({0, 1}), 0), std::invalid_argument);
    CHECK_THROWS_AS(stl::satisfies(f, line_trace({0, 1}), 0), std::invalid_argument);
}

TEST_CASE("smooth robustness") {
    const Formula p = Formula::atom(stl::halfspace(0, {1.0}, 1.5));
    const stl::Trace sigma = line_trace({0, 1, 2});
    const Formula ev = Formula::eventually({0, 2}, p);

    SUBCASE("large temperature recovers the exact value") {
        CHECK(std::abs(stl::smooth_robustness(ev, sigma, 0, 1e8).value - 0.5) < 1e-6);
    }
    SUBCASE("single-element windows are exact at any temperature") {
        const Formula single = Formula::eventually({1, 1}, p);
        for (double kappa : {0.1, 1.0, 25.0}) {
            CHECK(stl::smooth_robustness(single, sigma, 0, kappa).value ==
                  doctest::Approx(stl::robustness(single, sigma, 0)).epsilon(1e-15));
        }
    }
    SUBCASE("huge values do not overflow") {
        const stl::Trace wild = line_trace({1e6, -1e6, 3e5});
        const double v = stl::smooth_robustness(ev, wild, 0, 25.0).value;
        CHECK(std::isfinite(v));
        CHECK(v == doctest::Approx(1e6 - 1.5));
    }
    SUBCASE("temperature must be positive") {
        CHECK_THROWS_AS(stl::smooth_robustness(ev, sigma, 0, 0.0), std::invalid_argument);
    }
    SUBCASE("sentinels are left out of soft windows") {
        // G over a window that runs off the end keeps only real samples
        const Formula g = Formula::conj({Formula::always({5, 6}, p), ev});
        CHECK(stl::smooth_robustness(g, sigma, 0, 25.0).value ==
              doctest::Approx(stl::smooth_robustness(ev, sigma, 0, 25.0).value));
    }
}

TEST_CASE("smooth robustness gradient matches finite differences") {
    std::mt19937_64 rng(3);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const Formula f = testing::random_formula(rng, 3, 2, 2);
        stl::Trace tr = testing::random_trace(rng, 2, 2, 6);
        const double kappa = 5.0;
        const auto res = stl::smooth_robustness(f, tr, 0, kappa);
        if (std::abs(res.value) >= stl::kDefaultBig) {
            continue;
        }
        const double h = 1e-6;
        double err = 0.0;
        double scale = 0.0;
        for (int u = 0; u < tr.uav_count(); ++u) {
            for (std::size_t i = 0; i < tr.samples(u).size(); ++i) {
                auto plus = tr;
                auto minus = tr;
                plus.mutable_samples()[u][i] += h;
                minus.mutable_samples()[u][i] -= h;
                const double fd = (stl::smooth_robustness(f, plus, 0, kappa).value -
                                   stl::smooth_robustness(f, minus, 0, kappa).value) /
                                  (2 * h);
                err = std::max(err, std::abs(fd - res.gradient[u][i]));
                scale = std::max(scale, std::abs(fd));
            }
        }
        CHECK(err <= 1e-4 * std::max(scale, 1e-3));
        ++checked;
    }
    CHECK(checked > 20);
}

TEST_CASE("normalize_nnf pushes negations to atoms") {
    const auto ctx = example_context();
    const Formula p = stl::parse("p", ctx);
    const Formula q = stl::parse("q", ctx);
    CHECK(stl::normalize_nnf(Formula::negate(Formula::conj({p, q}))) ==
          Formula::disj({Formula::negate(p), Formula::negate(q)}));
    CHECK(stl::normalize_nnf(Formula::negate(Formula::eventually({1, 4}, p))) ==
          Formula::always({1, 4}, Formula::negate(p)));
    CHECK(stl::normalize_nnf(Formula::negate(Formula::negate(p))) == p);

    // equivalence on sampled traces, including negated until
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        Formula f = testing::random_formula(rng, 3, 2, 2);
        if (i % 2 == 0) {
            f = Formula::negate(f);
        }
        const Formula g = stl::normalize_nnf(f);
        std::function<bool(const Formula&, bool)> nnf_shape = [&](const Formula& x, bool under_not) {
            if (x.op() == stl::Op::Not) {
                return !under_not && (x.child().op() == stl::Op::Atom || x.child().op() == stl::Op::True);
            }
            for (const auto& c : x.children()) {
                if (!nnf_shape(c, false)) {
                    return false;
                }
            }
            return true;
        };
        CHECK(nnf_shape(g, false));
        // the until expansion may drop a UAV, so compare on traces long enough
        // that no window is truncated
        for (int j = 0; j < 3; ++j) {
            std::uniform_real_distribution<double> coord(-3.0, 3.0);
            std::vector<std::vector<double>> pos(2);
            for (auto& samples : pos) {
                samples.resize(static_cast<std::size_t>(stl::hrz(f) + 1 + static_cast<int>(rng() % 3)) * 2);
                for (auto& v : samples) {
                    v = coord(rng);
                }
            }
            const stl::Trace tr(0.5, 2, std::move(pos));
            CHECK(stl::robustness(g, tr, 0) == stl::robustness(f, tr, 0));
        }
    }
}

TEST_CASE("semantic properties on random instances") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 400; ++i) {
        const Formula f = testing::random_formula(rng, 3, 2, 2);
        const stl::Trace tr = testing::random_trace(rng, 2, 2, 10);
        const double rho = stl::robustness(f, tr, 0);
        const bool sat = stl::satisfies(f, tr, 0);
        CHECK(sat == testing::brute_force_satisfies(f, tr, 0));
        if (rho > 1e-9) {
            CHECK(sat);
        } else if (rho < -1e-9) {
            CHECK_FALSE(sat);
        }
        CHECK(stl::robustness(Formula::negate(f), tr, 0) == -rho);

        // smoothing error bound on sentinel-free values
        const double smooth = stl::smooth_robustness(f, tr, 0, 10.0).value;
        if (std::abs(rho) < 1e6 && std::abs(smooth) < 1e6) {
            CHECK(std::abs(smooth - rho) <= stl::smoothing_bound(f, 10.0) + 1e-12);
        }
    }
}

TEST_CASE("hrz + 1 samples are enough") {
    std::mt19937_64 rng(23);
    int satisfied = 0;
    for (int i = 0; i < 400; ++i) {
        const Formula f = testing::random_formula(rng, 3, 2, 1, 2);
        const int h = stl::hrz(f);
        // traces long enough to never be clipped by the formula
        stl::Trace tr = testing::random_trace(rng, 2, 1, 0, true);
        std::uniform_real_distribution<double> coord(-3.0, 3.0);
        for (auto& s : tr.mutable_samples()) {
            s.resize(h + 4);
            for (auto& v : s) {
                v = coord(rng);
            }
        }
        if (!stl::satisfies(f, tr, 0)) {
            continue;
        }
        ++satisfied;
        stl::Trace cut = tr;
        for (auto& s : cut.mutable_samples()) {
            s.resize(h + 1);
        }
        CHECK(stl::satisfies(f, cut, 0));
        CHECK(stl::robustness(f, cut, 0) == stl::robustness(f, tr, 0));
    }
    CHECK(satisfied > 50);
}

TEST_CASE("extending a trace moves safety and reachability robustness monotonically") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const auto atom = Formula::atom(testing::random_atom(rng, 1, 2));
        const Formula safety = Formula::always({0, 8}, Formula::always({0, 2}, atom));
        const Formula reach = Formula::eventually({1, 8}, Formula::eventually({0, 2}, atom));
        std::vector<double> xs;
        for (int k = 0; k < 4; ++k) {
            xs.push_back(coord(rng));
            xs.push_back(coord(rng));
        }
        double prev_safe = stl::robustness(safety, stl::Trace(0.5, 2, {xs}), 0);
        double prev_reach = stl::robustness(reach, stl::Trace(0.5, 2, {xs}), 0);
        for (int extra = 0; extra < 8; ++extra) {
            xs.push_back(coord(rng));
            xs.push_back(coord(rng));
            const stl::Trace tr(0.5, 2, {xs});
            const double s = stl::robustness(safety, tr, 0);
            const double r = stl::robustness(reach, tr, 0);
            CHECK(s <= prev_safe);
            CHECK(r >= prev_reach);
            prev_safe = s;
            prev_reach = r;
        }
    }
}

TEST_CASE("trace CSV round trip") {
    const stl::Trace tr(0.5, 2, {{0, 0, 1, 1, 2, 2.5}, {3, 3}});
    std::stringstream buf;
    stl::write_trace_csv(buf, tr);
    const stl::Trace back = stl::read_trace_csv(buf, 0.5);
    CHECK(back.uav_count() == 2);
    CHECK(back.length(0) == 2);
    CHECK(back.length(1) == 0);
    CHECK(back.samples(0) == tr.samples(0));

    std::stringstream gap("uav,k,x1\n1,0,0\n1,2,1\n");
    CHECK_THROWS(stl::read_trace_csv(gap));
}
