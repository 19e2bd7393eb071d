#include "fairfly/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fairfly {

void UavModel::validate() const {
    if (order != 1 && order != 2) {
        throw std::invalid_argument("model order must be 1 or 2");
    }
    if (dim <= 0) {
        throw std::invalid_argument("model dimension must be positive");
    }
    if (!(dt > 0.0) || !(u_max > 0.0) || (order == 2 && !(v_max > 0.0))) {
        throw std::invalid_argument("dt and bounds must be positive");
    }
}

double UavModel::max_step() const {
    return order == 1 ? dt * u_max : dt * v_max + 0.5 * dt * dt * u_max;
}

void step(const UavModel& model, std::span<double> pos, std::span<double> vel, std::span<const double> input) {
    const int dim = model.dim;
    for (int a = 0; a < dim; ++a) {
        if (std::abs(input[a]) > model.u_max * (1.0 + 1e-12)) {
            throw std::invalid_argument("input exceeds the bound u_max");
        }
    }
    if (model.order == 1) {
        for (int a = 0; a < dim; ++a) {
            pos[a] += model.dt * input[a];
        }
        return;
    }
    for (int a = 0; a < dim; ++a) {
        pos[a] += model.dt * vel[a] + 0.5 * model.dt * model.dt * input[a];
        vel[a] = std::clamp(vel[a] + model.dt * input[a], -model.v_max, model.v_max);
    }
}

void rollout_into(const UavModel& model, const FleetState& x0, const InputPlan& plan, stl::Trace& out) {
    const int dim = model.dim;
    const int uavs = x0.uav_count();
    if (static_cast<int>(plan.size()) != uavs) {
        throw std::invalid_argument("plan and initial state disagree on the UAV count");
    }
    if (out.uav_count() != uavs || out.dim() != dim || out.dt() != model.dt) {
        out = stl::Trace(model.dt, dim, std::vector<std::vector<double>>(uavs, std::vector<double>(dim, 0.0)));
    }
    auto& samples = out.mutable_samples();
    std::vector<double> vel(dim);
    for (int n = 0; n < uavs; ++n) {
        const auto& u = plan[n];
        const std::size_t steps = u.size() / dim;
        auto& s = samples[n];
        s.resize((steps + 1) * dim);
        std::copy(x0.pos[n].begin(), x0.pos[n].end(), s.begin());
        if (model.order == 1) {
            for (std::size_t k = 0; k < steps; ++k) {
                for (int a = 0; a < dim; ++a) {
                    s[(k + 1) * dim + a] = s[k * dim + a] + model.dt * u[k * dim + a];
                }
            }
            continue;
        }
        if (x0.vel.size() == static_cast<std::size_t>(uavs) && !x0.vel[n].empty()) {
            std::copy(x0.vel[n].begin(), x0.vel[n].end(), vel.begin());
        } else {
            std::fill(vel.begin(), vel.end(), 0.0);
        }
        for (std::size_t k = 0; k < steps; ++k) {
            for (int a = 0; a < dim; ++a) {
                const double acc = u[k * dim + a];
                s[(k + 1) * dim + a] = s[k * dim + a] + model.dt * vel[a] + 0.5 * model.dt * model.dt * acc;
                vel[a] = std::clamp(vel[a] + model.dt * acc, -model.v_max, model.v_max);
            }
        }
    }
}

stl::Trace rollout(const UavModel& model, const FleetState& x0, const InputPlan& plan) {
    model.validate();
    for (const auto& u : plan) {
        if (u.size() % model.dim != 0) {
            throw std::invalid_argument("input sequence length is not a multiple of the dimension");
        }
        for (double x : u) {
            if (std::abs(x) > model.u_max * (1.0 + 1e-12)) {
                throw std::invalid_argument("input exceeds the bound u_max");
            }
        }
    }
    stl::Trace out;
    rollout_into(model, x0, plan, out);
    return out;
}

void input_gradient(const UavModel& model, const FleetState& x0, const InputPlan& plan,
                    const std::vector<std::vector<double>>& position_grad, InputPlan& out) {
    const int dim = model.dim;
    out.resize(plan.size());
    for (std::size_t n = 0; n < plan.size(); ++n) {
        const auto& u = plan[n];
        const auto& g = position_grad[n];
        const std::size_t steps = u.size() / dim;
        auto& d = out[n];
        d.assign(u.size(), 0.0);
        if (model.order == 1) {
            for (int a = 0; a < dim; ++a) {
                double tail = 0.0; // sum of position adjoints after step k
                for (std::size_t k = steps; k-- > 0;) {
                    tail += g[(k + 1) * dim + a];
                    d[k * dim + a] = model.dt * tail;
                }
            }
            continue;
        }
        // order 2: replay velocities to know where the clamp was active
        std::vector<double> vel((steps + 1) * dim, 0.0);
        if (x0.vel.size() == plan.size() && !x0.vel[n].empty()) {
            std::copy(x0.vel[n].begin(), x0.vel[n].end(), vel.begin());
        }
        std::vector<char> clamped(steps * dim, 0);
        for (std::size_t k = 0; k < steps; ++k) {
            for (int a = 0; a < dim; ++a) {
                const double raw = vel[k * dim + a] + model.dt * u[k * dim + a];
                clamped[k * dim + a] = std::abs(raw) > model.v_max;
                vel[(k + 1) * dim + a] = std::clamp(raw, -model.v_max, model.v_max);
            }
        }
        const double half_dt2 = 0.5 * model.dt * model.dt;
        for (int a = 0; a < dim; ++a) {
            double lp = 0.0; // adjoint of pos[k+1]
            double lv = 0.0; // adjoint of vel[k+1]
            for (std::size_t k = steps; k-- > 0;) {
                lp += g[(k + 1) * dim + a];
                const double through_vel = clamped[k * dim + a] ? 0.0 : lv;
                d[k * dim + a] = half_dt2 * lp + model.dt * through_vel;
                lv = model.dt * lp + through_vel; // adjoint of vel[k]
            }
        }
    }
}

std::vector<std::vector<stl::Box>> reachable_boxes(const UavModel& model, const FleetState& x0,
                                                   const std::vector<int>& lengths) {
    const double reach = model.max_step();
    std::vector<std::vector<stl::Box>> out(lengths.size());
    for (std::size_t n = 0; n < lengths.size(); ++n) {
        for (int k = 0; k <= lengths[n]; ++k) {
            stl::Box b;
            b.lo = x0.pos[n];
            b.hi = x0.pos[n];
            for (int a = 0; a < model.dim; ++a) {
                b.lo[a] -= k * reach;
                b.hi[a] += k * reach;
            }
            out[n].push_back(std::move(b));
        }
    }
    return out;
}

FleetState sample_initial(const std::vector<stl::Box>& takeoff, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    FleetState x;
    for (const auto& box : takeoff) {
        std::vector<double> p(box.dim());
        for (std::size_t a = 0; a < box.dim(); ++a) {
            if (box.lo[a] > box.hi[a]) {
                throw std::invalid_argument("take-off box '" + box.name + "' is empty");
            }
            p[a] = box.lo[a] == box.hi[a] ? box.lo[a]
                                          : std::uniform_real_distribution<double>(box.lo[a], box.hi[a])(rng);
        }
        x.vel.emplace_back(p.size(), 0.0);
        x.pos.push_back(std::move(p));
    }
    return x;
}

} // namespace fairfly
