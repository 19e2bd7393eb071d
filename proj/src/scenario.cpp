#include "fairfly/scenario.hpp"

#include <algorithm>
#include <stdexcept>

namespace fairfly {

namespace {

bool interiors_overlap(const stl::Box& a, const stl::Box& b) {
    for (std::size_t i = 0; i < a.dim(); ++i) {
        if (std::max(a.lo[i], b.lo[i]) >= std::min(a.hi[i], b.hi[i])) {
            return false;
        }
    }
    return true;
}

stl::Box centred(const std::string& name, std::vector<double> c, double half) {
    stl::Box b{name, c, c};
    for (std::size_t i = 0; i < c.size(); ++i) {
        b.lo[i] -= half;
        b.hi[i] += half;
    }
    return b;
}

} // namespace

const stl::Box& Scenario::region(const std::string& region_name) const {
    auto it = regions.find(region_name);
    if (it == regions.end()) {
        throw std::invalid_argument("scenario '" + name + "': unknown region '" + region_name + "'");
    }
    return it->second;
}

void Scenario::validate() const {
    model.validate();
    const int uavs = uav_count();
    if (uavs == 0) {
        throw std::invalid_argument("scenario '" + name + "' has no UAVs (empty takeoff list)");
    }
    for (const auto& [key, box] : regions) {
        if (static_cast<int>(box.dim()) != model.dim || box.hi.size() != box.lo.size()) {
            throw std::invalid_argument("region '" + key + "' does not match the model dimension");
        }
        for (std::size_t i = 0; i < box.dim(); ++i) {
            if (box.lo[i] > box.hi[i]) {
                throw std::invalid_argument("region '" + key + "' is empty");
            }
        }
    }
    if (!(separation > 0.0)) {
        throw std::invalid_argument("separation must be positive");
    }
    if (mission.empty()) {
        if (static_cast<int>(goals.size()) != uavs || static_cast<int>(horizons.size()) != uavs) {
            throw std::invalid_argument("need one goal and one horizon per UAV");
        }
    }
    for (int h : horizons) {
        if (h < 0) {
            throw std::invalid_argument("horizons must be non-negative");
        }
    }
    for (const auto& o : obstacles) {
        const stl::Box& obstacle = region(o);
        for (const auto& g : goals) {
            if (interiors_overlap(region(g), obstacle)) {
                throw std::invalid_argument("goal '" + g + "' overlaps obstacle '" + o + "'");
            }
        }
        for (const auto& t : takeoff) {
            if (interiors_overlap(region(t), obstacle)) {
                throw std::invalid_argument("take-off box '" + t + "' overlaps obstacle '" + o + "'");
            }
        }
    }
    for (const auto& t : takeoff) {
        region(t);
    }
    fairness.validate(uavs);
}

stl::ParseContext Scenario::context() const {
    stl::ParseContext ctx;
    ctx.uav_count = uav_count();
    ctx.regions = regions;
    ctx.dim = model.dim;
    return ctx;
}

std::vector<stl::Box> Scenario::takeoff_boxes() const {
    std::vector<stl::Box> out;
    for (const auto& t : takeoff) {
        out.push_back(region(t));
    }
    return out;
}

stl::Formula Scenario::global_mission() const {
    if (!mission.empty()) {
        return stl::normalize_nnf(stl::parse(mission, context()));
    }
    std::vector<stl::Box> goal_boxes;
    for (const auto& g : goals) {
        goal_boxes.push_back(region(g));
    }
    std::vector<stl::Box> obstacle_boxes;
    for (const auto& o : obstacles) {
        obstacle_boxes.push_back(region(o));
    }
    return build_reach_avoid(horizons, goal_boxes, obstacle_boxes, separation);
}

stl::Formula build_reach_avoid(const std::vector<int>& horizons, const std::vector<stl::Box>& goals,
                               const std::vector<stl::Box>& obstacles, double separation) {
    const int uavs = static_cast<int>(horizons.size());
    if (static_cast<int>(goals.size()) != uavs) {
        throw std::invalid_argument("reach-avoid needs one goal region per UAV");
    }
    stl::FormulaList parts;
    for (int n = 0; n < uavs; ++n) {
        parts.push_back(stl::Formula::eventually({0, horizons[n]}, stl::Formula::atom(stl::in_box(n, goals[n]))));
    }
    if (!obstacles.empty()) {
        for (int n = 0; n < uavs; ++n) {
            stl::FormulaList avoid;
            for (const auto& o : obstacles) {
                avoid.push_back(stl::Formula::atom(stl::out_box(n, o)));
            }
            parts.push_back(stl::Formula::always({0, horizons[n]}, stl::Formula::conj(std::move(avoid))));
        }
    }
    // unordered pairs: the ordered conjunction repeats each term, same robustness
    for (int n = 0; n < uavs; ++n) {
        for (int m = n + 1; m < uavs; ++m) {
            parts.push_back(stl::Formula::always({0, std::min(horizons[n], horizons[m])},
                                                 stl::Formula::atom(stl::separation(n, m, separation))));
        }
    }
    return stl::Formula::conj(std::move(parts));
}

Scenario desk_map(int uav_count, std::vector<int> horizons) {
    // Each goal sits at an L-inf distance of (m - 0.25) m from its take-off
    // point, so with 1 m per step the shortest feasible flight is m steps:
    // m = 1, 1, 4, 5, 5. UAV 4 has to cut around the pillar corner.
    struct Slot {
        std::vector<double> start;
        std::vector<double> goal;
    };
    static const std::vector<Slot> slots = {
        {{22.0, 22.0, 5.0}, {22.75, 22.0, 5.0}},
        {{38.0, 22.0, 5.0}, {38.0, 22.75, 5.0}},
        {{22.0, 38.0, 5.0}, {25.75, 38.0, 5.0}},
        {{26.0, 30.0, 8.0}, {29.0, 25.25, 8.0}},
        {{34.0, 30.0, 11.0}, {34.0, 34.75, 11.0}},
    };
    static const std::vector<int> default_horizons = {10, 8, 5, 6, 7};
    if (uav_count < 1 || uav_count > static_cast<int>(slots.size())) {
        throw std::invalid_argument("the desk map holds 1 to 5 UAVs");
    }
    if (horizons.empty()) {
        horizons.assign(default_horizons.begin(), default_horizons.begin() + uav_count);
    }
    if (static_cast<int>(horizons.size()) != uav_count) {
        throw std::invalid_argument("desk map needs one horizon per UAV");
    }
    Scenario s;
    s.name = "desk-" + std::to_string(uav_count);
    s.model = UavModel{};
    s.separation = 2.0;
    s.horizons = std::move(horizons);
    s.regions["O"] = stl::Box{"O", {28.0, 28.0, 0.0}, {32.0, 32.0, 20.0}};
    s.obstacles = {"O"};
    for (int n = 0; n < uav_count; ++n) {
        const std::string id = std::to_string(n + 1);
        s.regions["G" + id] = centred("G" + id, slots[n].goal, 0.5);
        s.regions["I" + id] = centred("I" + id, slots[n].start, 0.1);
        s.goals.push_back("G" + id);
        s.takeoff.push_back("I" + id);
    }
    s.fairness = FairnessSpec{FairnessKind::F2, 0.75, {}};
    return s;
}

} // namespace fairfly
