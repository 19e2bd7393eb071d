#pragma once

#include "fairfly/stl.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fairfly {

/// Per-axis bounded integrator. Order 1 takes velocity inputs; order 2 takes
/// accelerations and clamps the velocity per axis.
struct UavModel {
    int order = 1;
    int dim = 3;
    double dt = 0.5;
    double u_max = 2.0;
    double v_max = 2.0; // order 2 only

    void validate() const;
    /// Largest per-axis displacement in one step.
    double max_step() const;
};

struct FleetState {
    std::vector<std::vector<double>> pos; // per UAV, dim entries
    std::vector<std::vector<double>> vel; // per UAV; zeros for order 1

    int uav_count() const { return static_cast<int>(pos.size()); }
};

/// Input sequences per UAV, flattened [k * dim + axis]; UAV n holds l[n]
/// inputs and so flies l[n] + 1 samples.
using InputPlan = std::vector<std::vector<double>>;

/// One step of a single UAV, in place. Throws on an input outside the bound.
void step(const UavModel& model, std::span<double> pos, std::span<double> vel, std::span<const double> input);

stl::Trace rollout(const UavModel& model, const FleetState& x0, const InputPlan& plan);
/// Rollout into an existing trace, reusing its storage. No bound checks.
void rollout_into(const UavModel& model, const FleetState& x0, const InputPlan& plan, stl::Trace& out);

/// Chains d(objective)/d(position) through the rollout to d/d(input).
/// `position_grad` has the Trace sample layout.
void input_gradient(const UavModel& model, const FleetState& x0, const InputPlan& plan,
                    const std::vector<std::vector<double>>& position_grad, InputPlan& out);

/// Per-axis boxes containing every position reachable at k = 0..l[n].
std::vector<std::vector<stl::Box>> reachable_boxes(const UavModel& model, const FleetState& x0,
                                                   const std::vector<int>& lengths);

/// Uniform draw from the product of the take-off boxes, zero velocity.
FleetState sample_initial(const std::vector<stl::Box>& takeoff, std::uint64_t seed);

} // namespace fairfly
