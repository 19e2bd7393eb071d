#pragma once

#include "fairfly/dynamics.hpp"
#include "fairfly/fairness.hpp"
#include "fairfly/stl.hpp"

#include <map>
#include <string>
#include <vector>

namespace fairfly {

inline constexpr int kScenarioSchemaVersion = 1;

struct Scenario {
    std::string name = "scenario";
    UavModel model;
    std::map<std::string, stl::Box> regions;
    std::vector<std::string> goals;     // region name per UAV
    std::vector<std::string> takeoff;   // region name per UAV
    std::vector<std::string> obstacles; // avoided by every UAV
    double separation = 2.0;
    std::vector<int> horizons; // per UAV
    std::string mission;       // STL text; empty means the generated reach-avoid mission
    FairnessSpec fairness;

    int uav_count() const { return static_cast<int>(takeoff.size()); }
    /// Throws std::invalid_argument describing the first problem found.
    void validate() const;
    stl::ParseContext context() const;
    /// Global mission in negation normal form.
    stl::Formula global_mission() const;
    std::vector<stl::Box> takeoff_boxes() const;
    const stl::Box& region(const std::string& name) const;
};

/// Conjunction of: each UAV eventually in its goal within H_n, each UAV
/// outside every obstacle for [0, H_n], each pair separated by more than s
/// for [0, min(H_n, H_m)].
stl::Formula build_reach_avoid(const std::vector<int>& horizons, const std::vector<stl::Box>& goals,
                               const std::vector<stl::Box>& obstacles, double separation);

/// Shipped map: 60 x 60 x 20 m airspace with one central pillar, the first
/// `uav_count` (<= 5) UAVs, horizons (10, 8, 5, 6, 7) unless given.
Scenario desk_map(int uav_count = 5, std::vector<int> horizons = {});

} // namespace fairfly
