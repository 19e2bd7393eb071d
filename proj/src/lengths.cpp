#include "fairfly/lengths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairfly {

bool PLBox::contains(const LengthTuple& l) const {
    if (l.size() != lo.size()) {
        return false;
    }
    for (std::size_t n = 0; n < l.size(); ++n) {
        if (l[n] < lo[n] || l[n] > hi[n]) {
            return false;
        }
    }
    return true;
}

double PLBox::cardinality() const {
    double c = 1.0;
    for (std::size_t n = 0; n < lo.size(); ++n) {
        c *= static_cast<double>(hi[n] - lo[n] + 1);
    }
    return c;
}

namespace {

using stl::Formula;
using stl::Op;

// Per-UAV lower bound on the final index needed to satisfy f at t = 0.
std::vector<int> lower(const Formula& f, int uav_count) {
    std::vector<int> out(uav_count, 0);
    switch (f.op()) {
    case Op::True:
    case Op::Atom:
    case Op::Not:
        return out;
    case Op::And:
    case Op::Or: {
        const bool is_and = f.op() == Op::And;
        bool first = true;
        for (const auto& c : f.children()) {
            const auto sub = lower(c, uav_count);
            for (int n = 0; n < uav_count; ++n) {
                out[n] = first ? sub[n] : (is_and ? std::max(out[n], sub[n]) : std::min(out[n], sub[n]));
            }
            first = false;
        }
        return out;
    }
    case Op::Eventually: {
        const auto sub = lower(f.child(), uav_count);
        for (int n : f.uavs()) {
            out[n] = f.interval().lo + sub[n];
        }
        return out;
    }
    case Op::Always:
        // a window starting after the last sample is vacuously true
        return f.interval().lo == 0 ? lower(f.child(), uav_count) : out;
    case Op::Until: {
        // the lhs is vacuous past its last sample, so only the rhs constrains
        const auto sub = lower(f.child(1), uav_count);
        for (int n : f.child(1).uavs()) {
            out[n] = f.interval().lo + sub[n];
        }
        return out;
    }
    }
    return out;
}

// Per-UAV horizon of the sub-formulas mentioning that UAV (-1 if none).
std::vector<int> upper(const Formula& f, int uav_count) {
    std::vector<int> out(uav_count, -1);
    switch (f.op()) {
    case Op::True:
        return out;
    case Op::Atom:
        for (int n : f.uavs()) {
            out[n] = 0;
        }
        return out;
    default:
        break;
    }
    for (const auto& c : f.children()) {
        const auto sub = upper(c, uav_count);
        for (int n = 0; n < uav_count; ++n) {
            out[n] = std::max(out[n], sub[n]);
        }
    }
    if (f.op() == Op::Eventually || f.op() == Op::Always || f.op() == Op::Until) {
        for (int n = 0; n < uav_count; ++n) {
            if (out[n] >= 0) {
                out[n] += f.interval().hi;
            }
        }
    }
    return out;
}

} // namespace

PLBox pl_bounds(const stl::Formula& nnf, int uav_count) {
    if (uav_count <= 0) {
        throw std::invalid_argument("pl_bounds needs at least one UAV");
    }
    if (!nnf.uavs().empty() && nnf.uavs().back() >= uav_count) {
        throw std::invalid_argument("formula references UAV " + std::to_string(nnf.uavs().back() + 1) +
                                    " but the fleet has " + std::to_string(uav_count));
    }
    const Formula f = stl::normalize_nnf(nnf);
    PLBox box;
    box.lo = lower(f, uav_count);
    box.hi = upper(f, uav_count);
    for (int n = 0; n < uav_count; ++n) {
        box.hi[n] = std::max(box.hi[n], 0);
        box.lo[n] = std::min(box.lo[n], box.hi[n]);
    }
    return box;
}

std::vector<double> alpha_unchecked(const LengthTuple& l, const PLBox& box) {
    if (l.size() != box.lo.size()) {
        throw std::invalid_argument("length tuple size does not match the box");
    }
    std::vector<double> a(l.size(), 0.0);
    for (std::size_t n = 0; n < l.size(); ++n) {
        if (box.hi[n] > box.lo[n]) {
            a[n] = static_cast<double>(l[n] - box.lo[n]) / static_cast<double>(box.hi[n] - box.lo[n]);
        }
    }
    return a;
}

std::vector<double> alpha(const LengthTuple& l, const PLBox& box) {
    if (!box.contains(l)) {
        throw std::out_of_range("length tuple lies outside the promising-length box");
    }
    return alpha_unchecked(l, box);
}

// ---------------------------------------------------------------------------

void SearchFrontier::record_infeasible(const LengthTuple& l) {
    if (best_ && *best_ == l) {
        throw std::logic_error("tuple already recorded as the best feasible one");
    }
    if (rule_ == PruneRule::Dominance) {
        for (const auto& r : infeasible_) {
            if (std::equal(l.begin(), l.end(), r.begin(), [](int a, int b) { return a <= b; })) {
                return; // already covered
            }
        }
        std::erase_if(infeasible_, [&](const LengthTuple& r) {
            return std::equal(r.begin(), r.end(), l.begin(), [](int a, int b) { return a <= b; });
        });
        infeasible_.push_back(l);
        return;
    }
    if (infeasible_.empty()) {
        infeasible_.push_back(l);
    } else if (infeasible_.front() < l) {
        infeasible_.front() = l; // the lexicographic maximum covers the rest
    }
}

bool SearchFrontier::is_pruned_infeasible(const LengthTuple& l) const {
    for (const auto& r : infeasible_) {
        if (rule_ == PruneRule::Lexicographic) {
            if (!(r < l)) {
                return true;
            }
        } else if (std::equal(l.begin(), l.end(), r.begin(), [](int a, int b) { return a <= b; })) {
            return true;
        }
    }
    return false;
}

void SearchFrontier::record_feasible(const LengthTuple& l, double fairness) {
    if (is_pruned_infeasible(l)) {
        throw std::logic_error("tuple is covered by a recorded infeasible tuple");
    }
    feasible_.emplace_back(l, fairness);
    if (!best_ || fairness > best_fairness_) {
        best_ = l;
        best_fairness_ = fairness;
    }
}

bool SearchFrontier::is_pruned_unfair(double fairness) const {
    return best_ && fairness < best_fairness_ - kFairnessTieTolerance;
}

// ---------------------------------------------------------------------------

FairestFirst::FairestFirst(PLBox box, FairnessSpec spec, double enumeration_cap)
    : box_(std::move(box)), spec_(std::move(spec)) {
    spec_.validate(box_.uav_count());
    exhaustive_ = box_.cardinality() <= enumeration_cap;
    if (exhaustive_) {
        LengthTuple l = box_.lo;
        while (true) {
            order_.push_back(make_entry(l));
            int n = box_.uav_count() - 1;
            while (n >= 0 && l[n] == box_.hi[n]) {
                l[n] = box_.lo[n];
                --n;
            }
            if (n < 0) {
                break;
            }
            ++l[n];
        }
        std::sort(order_.begin(), order_.end(), [this](const Entry& a, const Entry& b) { return before(a, b); });
    } else {
        LengthTuple start = spec_.kind == FairnessKind::F1 ? box_.hi : box_.lo;
        enqueued_.insert(start);
        order_.push_back(make_entry(std::move(start)));
    }
}

double FairestFirst::fairness(const LengthTuple& l) const { return spec_.score(alpha(l, box_)); }

FairestFirst::Entry FairestFirst::make_entry(LengthTuple l) const {
    Entry e;
    e.key = std::llround(fairness(l) / kFairnessTieTolerance);
    e.sum = 0;
    for (int x : l) {
        e.sum += x;
    }
    e.tuple = std::move(l);
    return e;
}

bool FairestFirst::before(const Entry& a, const Entry& b) const {
    if (a.key != b.key) {
        return a.key > b.key;
    }
    if (a.sum != b.sum) {
        return spec_.kind == FairnessKind::F1 ? a.sum > b.sum : a.sum < b.sum;
    }
    return a.tuple < b.tuple;
}

std::optional<LengthTuple> FairestFirst::pop() {
    if (exhaustive_) {
        if (cursor_ >= order_.size()) {
            return std::nullopt;
        }
        return order_[cursor_++].tuple;
    }
    if (order_.empty()) {
        return std::nullopt;
    }
    auto worse = [this](const Entry& a, const Entry& b) { return before(b, a); };
    std::pop_heap(order_.begin(), order_.end(), worse);
    LengthTuple top = std::move(order_.back().tuple);
    order_.pop_back();
    for (int n = 0; n < box_.uav_count(); ++n) {
        for (int d : {-1, 1}) {
            LengthTuple nb = top;
            nb[n] += d;
            if (nb[n] < box_.lo[n] || nb[n] > box_.hi[n] || !enqueued_.insert(nb).second) {
                continue;
            }
            order_.push_back(make_entry(std::move(nb)));
            std::push_heap(order_.begin(), order_.end(), worse);
        }
    }
    return top;
}

std::optional<LengthTuple> FairestFirst::next(SearchFrontier& frontier) {
    while (auto l = pop()) {
        if (frontier.is_visited(*l)) {
            continue;
        }
        frontier.mark_visited(*l);
        if (frontier.is_pruned_infeasible(*l)) {
            ++frontier.pruned_dominance;
            continue;
        }
        if (frontier.is_pruned_unfair(fairness(*l))) {
            ++frontier.pruned_fairness;
            continue;
        }
        return l;
    }
    return std::nullopt;
}

std::optional<LengthTuple> sample_random(const PLBox& box, SearchFrontier& frontier, std::mt19937_64& rng) {
    auto usable = [&](const LengthTuple& l) { return !frontier.is_visited(l) && !frontier.is_pruned_infeasible(l); };
    LengthTuple l(box.lo.size());
    for (int attempt = 0; attempt < 64; ++attempt) {
        for (std::size_t n = 0; n < l.size(); ++n) {
            l[n] = std::uniform_int_distribution<int>(box.lo[n], box.hi[n])(rng);
        }
        if (usable(l)) {
            frontier.mark_visited(l);
            return l;
        }
    }
    if (box.cardinality() > FairestFirst::kDefaultEnumerationCap) {
        return std::nullopt;
    }
    // crowded box: draw uniformly from the explicit remainder
    std::vector<LengthTuple> left;
    l = box.lo;
    while (true) {
        if (usable(l)) {
            left.push_back(l);
        }
        int n = static_cast<int>(l.size()) - 1;
        while (n >= 0 && l[n] == box.hi[n]) {
            l[n] = box.lo[n];
            --n;
        }
        if (n < 0) {
            break;
        }
        ++l[n];
    }
    if (left.empty()) {
        return std::nullopt;
    }
    const auto pick = std::uniform_int_distribution<std::size_t>(0, left.size() - 1)(rng);
    frontier.mark_visited(left[pick]);
    return left[pick];
}

} // namespace fairfly
