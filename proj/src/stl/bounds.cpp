// Interval version of the robustness recursion: every UAV position is only
// known up to a box, so each node yields a [lo, hi] enclosure.

#include "fairfly/stl.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

namespace fairfly::stl {

namespace {

using Reach = std::vector<std::vector<Box>>;

const Box& box_at(const Reach& reach, int uav, int k) {
    const auto& seq = reach.at(uav);
    return seq[std::min<std::size_t>(static_cast<std::size_t>(k), seq.size() - 1)];
}

RobustnessBounds atom_bounds(const AtomicPredicate& p, const Reach& reach, int t) {
    const Box& a = box_at(reach, p.uav_a, t);
    const std::size_t dim = a.dim();
    switch (p.kind) {
    case AtomKind::Halfspace: {
        RobustnessBounds r{-p.offset, -p.offset};
        for (std::size_t i = 0; i < dim; ++i) {
            const double x = p.coeffs[i] * a.lo[i];
            const double y = p.coeffs[i] * a.hi[i];
            r.lo += std::min(x, y);
            r.hi += std::max(x, y);
        }
        return r;
    }
    case AtomKind::InBox:
    case AtomKind::OutBox: {
        RobustnessBounds r{INFINITY, INFINITY};
        for (std::size_t i = 0; i < dim; ++i) {
            auto margin = [&](double x) { return std::min(x - p.box.lo[i], p.box.hi[i] - x); };
            const double centre = std::clamp(0.5 * (p.box.lo[i] + p.box.hi[i]), a.lo[i], a.hi[i]);
            r.hi = std::min(r.hi, margin(centre));
            r.lo = std::min({r.lo, margin(a.lo[i]), margin(a.hi[i])});
        }
        return p.kind == AtomKind::InBox ? r : RobustnessBounds{-r.hi, -r.lo};
    }
    case AtomKind::Separation: {
        const Box& b = box_at(reach, p.uav_b, t);
        double near = 0.0;
        double far = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double lo = a.lo[i] - b.hi[i];
            const double hi = a.hi[i] - b.lo[i];
            const double m = std::max(std::abs(lo), std::abs(hi));
            far += m * m;
            if (lo > 0.0 || hi < 0.0) {
                const double n = std::min(std::abs(lo), std::abs(hi));
                near += n * n;
            }
        }
        return {std::sqrt(near) - p.offset, std::sqrt(far) - p.offset};
    }
    }
    return {0.0, 0.0};
}

int availability(const Formula& f, const Reach& reach) {
    int end = INT_MAX;
    for (int u : f.uavs()) {
        end = std::min(end, static_cast<int>(reach.at(u).size()) - 1);
    }
    return end;
}

struct Bounder {
    const Reach& reach;
    double big;

    RobustnessBounds fold(bool take_max, const std::vector<RobustnessBounds>& parts) const {
        if (parts.empty()) {
            const double v = take_max ? -big : big;
            return {v, v};
        }
        RobustnessBounds r = parts.front();
        for (const auto& p : parts) {
            r.lo = take_max ? std::max(r.lo, p.lo) : std::min(r.lo, p.lo);
            r.hi = take_max ? std::max(r.hi, p.hi) : std::min(r.hi, p.hi);
        }
        return r;
    }

    RobustnessBounds eval(const Formula& f, int t) const {
        switch (f.op()) {
        case Op::True:
            return {big, big};
        case Op::Atom:
            return atom_bounds(f.predicate(), reach, t);
        case Op::Not: {
            const auto c = eval(f.child(), t);
            return {-c.hi, -c.lo};
        }
        case Op::And:
        case Op::Or: {
            std::vector<RobustnessBounds> parts;
            for (const auto& c : f.children()) {
                parts.push_back(eval(c, t));
            }
            return fold(f.op() == Op::Or, parts);
        }
        case Op::Eventually:
        case Op::Always: {
            const long long end = std::min<long long>(static_cast<long long>(t) + f.interval().hi, availability(f, reach));
            std::vector<RobustnessBounds> parts;
            for (long long s = t + f.interval().lo; s <= end; ++s) {
                parts.push_back(eval(f.child(), static_cast<int>(s)));
            }
            return fold(f.op() == Op::Eventually, parts);
        }
        case Op::Until: {
            const long long end2 =
                std::min<long long>(static_cast<long long>(t) + f.interval().hi, availability(f.child(1), reach));
            const int end1 = availability(f.child(0), reach);
            std::vector<RobustnessBounds> candidates;
            for (long long s = t + f.interval().lo; s <= end2; ++s) {
                std::vector<RobustnessBounds> held{eval(f.child(1), static_cast<int>(s))};
                for (long long r = t + 1; r < s && r <= end1; ++r) {
                    held.push_back(eval(f.child(0), static_cast<int>(r)));
                }
                candidates.push_back(fold(false, held));
            }
            return fold(true, candidates);
        }
        }
        return {0.0, 0.0};
    }
};

} // namespace

RobustnessBounds robustness_bounds(const Formula& formula, const std::vector<std::vector<Box>>& reach, int t,
                                   const EvalOptions& options) {
    if (!formula.uavs().empty() && formula.uavs().back() >= static_cast<int>(reach.size())) {
        throw std::invalid_argument("formula references a UAV without reachable boxes");
    }
    for (const auto& seq : reach) {
        if (seq.empty()) {
            throw std::invalid_argument("every UAV needs at least one reachable box");
        }
    }
    Bounder b{reach, options.big};
    auto r = b.eval(formula, t);
    r.lo = std::clamp(r.lo, -options.big, options.big);
    r.hi = std::clamp(r.hi, -options.big, options.big);
    return r;
}

} // namespace fairfly::stl
