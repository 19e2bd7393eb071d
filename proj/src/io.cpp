#include "fairfly/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fairfly {

namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Json box_json(const stl::Box& b) { return Json{{"lo", b.lo}, {"hi", b.hi}}; }

} // namespace

Json to_json(const FairnessSpec& spec) {
    Json j{{"kind", to_string(spec.kind)}, {"w", spec.w}};
    if (spec.kind == FairnessKind::F2Imb) {
        j["v"] = spec.v;
    }
    return j;
}

FairnessSpec fairness_from_json(const Json& j) {
    FairnessSpec spec;
    spec.kind = parse_fairness_kind(j.at("kind").get<std::string>());
    spec.w = get_or(j, "w", 0.75);
    spec.v = get_or(j, "v", std::vector<double>{});
    return spec;
}

Json to_json(const Scenario& s) {
    Json regions = Json::object();
    for (const auto& [name, box] : s.regions) {
        regions[name] = box_json(box);
    }
    Json j{{"version", kScenarioSchemaVersion},
           {"name", s.name},
           {"model",
            {{"order", s.model.order}, {"dim", s.model.dim}, {"dt", s.model.dt}, {"u_max", s.model.u_max},
             {"v_max", s.model.v_max}}},
           {"regions", regions},
           {"goals", s.goals},
           {"takeoff", s.takeoff},
           {"obstacles", s.obstacles},
           {"separation", s.separation},
           {"horizons", s.horizons},
           {"fairness", to_json(s.fairness)}};
    if (!s.mission.empty()) {
        j["mission"] = s.mission;
    }
    return j;
}

Scenario scenario_from_json(const Json& j) {
    const int version = get_or(j, "version", kScenarioSchemaVersion);
    if (version != kScenarioSchemaVersion) {
        throw std::invalid_argument("unsupported scenario schema version " + std::to_string(version));
    }
    Scenario s;
    s.name = get_or<std::string>(j, "name", "scenario");
    if (j.contains("model")) {
        const Json& m = j.at("model");
        s.model.order = get_or(m, "order", s.model.order);
        s.model.dim = get_or(m, "dim", s.model.dim);
        s.model.dt = get_or(m, "dt", s.model.dt);
        s.model.u_max = get_or(m, "u_max", s.model.u_max);
        s.model.v_max = get_or(m, "v_max", s.model.v_max);
    }
    for (const auto& [name, box] : j.at("regions").items()) {
        s.regions[name] = stl::Box{name, box.at("lo").get<std::vector<double>>(), box.at("hi").get<std::vector<double>>()};
    }
    s.goals = get_or(j, "goals", std::vector<std::string>{});
    s.takeoff = j.at("takeoff").get<std::vector<std::string>>();
    s.obstacles = get_or(j, "obstacles", std::vector<std::string>{});
    s.separation = get_or(j, "separation", s.separation);
    s.horizons = get_or(j, "horizons", std::vector<int>{});
    s.mission = get_or<std::string>(j, "mission", "");
    if (j.contains("fairness")) {
        s.fairness = fairness_from_json(j.at("fairness"));
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    try {
        return scenario_from_json(read_json_file(path));
    } catch (const Json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

Json to_json(const SearchFrontier& f) {
    Json feasible = Json::array();
    for (const auto& [tuple, fairness] : f.feasible()) {
        feasible.push_back({{"tuple", tuple}, {"fairness", fairness}});
    }
    Json j{{"rule", f.rule() == PruneRule::Dominance ? "dominance" : "lexicographic"},
           {"visited", f.visited()},
           {"infeasible", f.infeasible()},
           {"feasible", feasible},
           {"pruned_dominance", f.pruned_dominance},
           {"pruned_fairness", f.pruned_fairness}};
    if (f.has_feasible()) {
        j["best"] = {{"tuple", f.best_tuple()}, {"fairness", f.best_fairness()}};
    } else {
        j["best"] = nullptr;
    }
    return j;
}

Json to_json(const PlanResult& p, const FleetState& x0) {
    return Json{{"algorithm", p.algorithm},
                {"feasible", p.feasible},
                {"tuple", p.tuple},
                {"fairness", p.fairness},
                {"alpha", p.alpha},
                {"fairness_spec", to_json(p.spec)},
                {"box", {{"lo", p.box.lo}, {"hi", p.box.hi}}},
                {"robustness", p.inner.robustness},
                {"dimension", p.inner.dimension},
                {"x0", x0.pos},
                {"inputs", p.inner.plan},
                {"stats",
                 {{"examined", p.stats.examined},
                  {"inner_calls", p.stats.inner_calls},
                  {"screened", p.stats.screened},
                  {"pruned_dominance", p.stats.pruned_dominance},
                  {"pruned_fairness", p.stats.pruned_fairness},
                  {"random_probes", p.stats.random_probes},
                  {"iterations", p.inner.iterations},
                  {"restarts", p.inner.restarts}}},
                {"frontier", to_json(p.frontier)},
                {"timings",
                 {{"search_ms", p.timings.search_ms},
                  {"polish_ms", p.timings.polish_ms},
                  {"total_ms", p.timings.total_ms},
                  {"inner_ms", p.inner.wall_ms}}}};
}

PlanResult plan_from_json(const Json& j, FleetState* x0) {
    PlanResult p;
    p.algorithm = get_or<std::string>(j, "algorithm", "fairfly");
    p.feasible = j.at("feasible").get<bool>();
    p.tuple = j.at("tuple").get<LengthTuple>();
    p.fairness = get_or(j, "fairness", 0.0);
    p.alpha = get_or(j, "alpha", std::vector<double>{});
    if (j.contains("box")) {
        p.box.lo = j.at("box").at("lo").get<std::vector<int>>();
        p.box.hi = j.at("box").at("hi").get<std::vector<int>>();
    }
    if (j.contains("fairness_spec")) {
        p.spec = fairness_from_json(j.at("fairness_spec"));
    }
    p.inner.robustness = j.at("robustness").get<double>();
    p.inner.feasible = p.inner.robustness > 0.0;
    p.inner.plan = j.at("inputs").get<InputPlan>();
    p.inner.dimension = get_or(j, "dimension", 0);
    if (x0 != nullptr) {
        x0->pos = j.at("x0").get<std::vector<std::vector<double>>>();
        x0->vel.assign(x0->pos.size(), std::vector<double>(x0->pos.empty() ? 0 : x0->pos[0].size(), 0.0));
    }
    return p;
}

Json to_json(const OnlineRun& run) {
    Json iterations = Json::array();
    Json times = Json::array();
    for (const auto& it : run.iterations) {
        iterations.push_back({{"k", it.k},
                              {"dimension", it.dimension},
                              {"robustness", it.robustness},
                              {"resolved", it.resolved},
                              {"violation", it.violation}});
        times.push_back(it.solve_ms);
    }
    std::vector<std::vector<double>> executed;
    for (int n = 0; n < run.executed.uav_count(); ++n) {
        executed.push_back(run.executed.samples(n));
    }
    return Json{{"satisfied", run.satisfied},
                {"offline_robustness", run.offline_robustness},
                {"final_robustness", run.final_robustness},
                {"violations", run.violations},
                {"noise", run.noise},
                {"seed", run.seed},
                {"iterations", iterations},
                {"executed", executed},
                {"timings", {{"first_solve_ms", run.first_solve_ms}, {"solve_ms", times}}}};
}

BenchmarkConfig benchmark_config_from_json(const Json& j) {
    BenchmarkConfig c;
    c.uav_counts = get_or(j, "uav_counts", c.uav_counts);
    c.algorithms = get_or(j, "algorithms", c.algorithms);
    c.seeds = get_or(j, "seeds", c.seeds);
    c.base_seed = get_or(j, "base_seed", c.base_seed);
    c.w = get_or(j, "w", c.w);
    c.online = get_or(j, "online", c.online);
    c.threads = get_or(j, "threads", c.threads);
    if (j.contains("optimizer")) {
        const Json& o = j.at("optimizer");
        c.optimizer.kappa = get_or(o, "kappa", c.optimizer.kappa);
        c.optimizer.restarts = get_or(o, "restarts", c.optimizer.restarts);
        c.optimizer.max_iterations = get_or(o, "max_iterations", c.optimizer.max_iterations);
        c.optimizer.margin = get_or(o, "margin", c.optimizer.margin);
        c.optimizer.screen = get_or(o, "screen", c.optimizer.screen);
        c.optimizer.random_every = get_or(o, "random_every", c.optimizer.random_every);
    }
    return c;
}

Json to_json(const BenchmarkReport& report) {
    Json rows = Json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"algorithm", r.algorithm},
                        {"D", r.uav_count},
                        {"seed", r.seed},
                        {"ok", r.ok},
                        {"failure", r.failure},
                        {"tuple", r.tuple},
                        {"robustness", r.robustness},
                        {"fairness_f1", r.fairness_f1},
                        {"fairness_f2", r.fairness_f2},
                        {"offline_ms", r.offline_ms},
                        {"online_first_ms", r.online_first_ms},
                        {"inner_calls", r.inner_calls},
                        {"dimension", r.dimension}});
    }
    Json cells = Json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"algorithm", c.algorithm},
                         {"D", c.uav_count},
                         {"samples", c.samples},
                         {"failures", c.failures},
                         {"robustness", c.robustness},
                         {"fairness_f1", c.fairness_f1},
                         {"fairness_f2", c.fairness_f2},
                         {"offline_ms", c.offline_ms},
                         {"online_first_ms", c.online_first_ms}});
    }
    return Json{{"rows", rows}, {"cells", cells}};
}

BenchmarkReport report_from_json(const Json& j) {
    BenchmarkReport report;
    for (const auto& r : j.at("rows")) {
        BenchmarkRow row;
        row.algorithm = r.at("algorithm").get<std::string>();
        row.uav_count = r.at("D").get<int>();
        row.seed = r.at("seed").get<std::uint64_t>();
        row.ok = r.at("ok").get<bool>();
        row.failure = get_or<std::string>(r, "failure", "");
        row.tuple = get_or(r, "tuple", LengthTuple{});
        row.robustness = r.at("robustness").get<double>();
        row.fairness_f1 = r.at("fairness_f1").get<double>();
        row.fairness_f2 = r.at("fairness_f2").get<double>();
        row.offline_ms = r.at("offline_ms").get<double>();
        row.online_first_ms = r.at("online_first_ms").get<double>();
        row.inner_calls = get_or(r, "inner_calls", 0);
        row.dimension = get_or(r, "dimension", 0);
        report.rows.push_back(row);
    }
    for (const auto& c : j.at("cells")) {
        BenchmarkCell cell;
        cell.algorithm = c.at("algorithm").get<std::string>();
        cell.uav_count = c.at("D").get<int>();
        cell.samples = c.at("samples").get<int>();
        cell.failures = get_or(c, "failures", 0);
        cell.robustness = c.at("robustness").get<double>();
        cell.fairness_f1 = c.at("fairness_f1").get<double>();
        cell.fairness_f2 = c.at("fairness_f2").get<double>();
        cell.offline_ms = c.at("offline_ms").get<double>();
        cell.online_first_ms = c.at("online_first_ms").get<double>();
        report.cells.push_back(cell);
    }
    return report;
}

Json plot_data(const BenchmarkReport& report) {
    // one figure per metric, one series per algorithm, x = D
    const std::vector<std::pair<std::string, double BenchmarkCell::*>> metrics = {
        {"robustness", &BenchmarkCell::robustness},
        {"fairness_f1", &BenchmarkCell::fairness_f1},
        {"fairness_f2", &BenchmarkCell::fairness_f2},
        {"offline_ms", &BenchmarkCell::offline_ms},
        {"online_first_ms", &BenchmarkCell::online_first_ms},
    };
    Json figures = Json::object();
    for (const auto& [metric, field] : metrics) {
        Json series = Json::object();
        for (const auto& c : report.cells) {
            Json& s = series[c.algorithm];
            s["D"].push_back(c.uav_count);
            s["mean"].push_back(c.*field);
            s["samples"].push_back(c.samples);
        }
        figures[metric] = series;
    }
    return figures;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << text;
}

} // namespace fairfly
