#pragma once

#include "fairfly/fairness.hpp"
#include "fairfly/stl.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <vector>

namespace fairfly {

/// Final time index per UAV: UAV n flies samples 0..l[n].
using LengthTuple = std::vector<int>;

/// Per-UAV promising length ranges lo[n]..hi[n].
struct PLBox {
    std::vector<int> lo;
    std::vector<int> hi;

    int uav_count() const { return static_cast<int>(lo.size()); }
    bool contains(const LengthTuple& l) const;
    /// Number of tuples in the box (as a double, it can be huge).
    double cardinality() const;
    bool operator==(const PLBox&) const = default;
};

/// Box over-approximation of the promising lengths of an NNF formula.
/// Throws if the formula mentions a UAV index >= uav_count.
PLBox pl_bounds(const stl::Formula& nnf, int uav_count);

/// Position of each l[n] inside its range; 0 for a degenerate range.
/// Throws std::out_of_range when l is outside the box.
std::vector<double> alpha(const LengthTuple& l, const PLBox& box);
/// Same formula without the range check (values may leave [0, 1]).
std::vector<double> alpha_unchecked(const LengthTuple& l, const PLBox& box);

enum class PruneRule { Dominance, Lexicographic };

/// Verdicts collected by the outer search.
class SearchFrontier {
public:
    explicit SearchFrontier(PruneRule rule = PruneRule::Dominance) : rule_(rule) {}

    void record_infeasible(const LengthTuple& l);
    /// Dominance: some recorded infeasible tuple is >= l componentwise.
    /// Lexicographic: some recorded infeasible tuple is >= l lexicographically.
    bool is_pruned_infeasible(const LengthTuple& l) const;

    void record_feasible(const LengthTuple& l, double fairness);
    /// True when a feasible tuple with strictly larger fairness is on record.
    bool is_pruned_unfair(double fairness) const;

    bool has_feasible() const { return best_.has_value(); }
    const LengthTuple& best_tuple() const { return *best_; }
    double best_fairness() const { return best_fairness_; }

    bool is_visited(const LengthTuple& l) const { return visited_.count(l) != 0; }
    void mark_visited(const LengthTuple& l) { visited_.insert(l); }

    PruneRule rule() const { return rule_; }
    const std::set<LengthTuple>& visited() const { return visited_; }
    /// Maximal recorded infeasible tuples (dominated records are folded in).
    const std::vector<LengthTuple>& infeasible() const { return infeasible_; }
    const std::vector<std::pair<LengthTuple, double>>& feasible() const { return feasible_; }

    std::int64_t pruned_dominance = 0;
    std::int64_t pruned_fairness = 0;

private:
    PruneRule rule_;
    std::set<LengthTuple> visited_;
    std::vector<LengthTuple> infeasible_;
    std::vector<std::pair<LengthTuple, double>> feasible_;
    std::optional<LengthTuple> best_;
    double best_fairness_ = 0.0;
};

/// Hands out box tuples in non-increasing fairness. Below the enumeration
/// cap the whole box is sorted; above it a best-first expansion over +/-1
/// neighbours starts from the unconstrained argmax (locally optimal only).
/// Ties go to the smaller sum of lengths (larger for f1, so that the all-hi
/// tuple leads), then to lexicographic order.
class FairestFirst {
public:
    static constexpr double kDefaultEnumerationCap = 200000;

    FairestFirst(PLBox box, FairnessSpec spec, double enumeration_cap = kDefaultEnumerationCap);

    /// Next unvisited tuple that is not pruned; marks it visited. Pruned
    /// tuples met on the way are marked visited and counted in the frontier.
    std::optional<LengthTuple> next(SearchFrontier& frontier);

    double fairness(const LengthTuple& l) const;
    bool exhaustive() const { return exhaustive_; }
    const PLBox& box() const { return box_; }

private:
    struct Entry {
        long long key; // quantized fairness
        int sum;
        LengthTuple tuple;
    };
    bool before(const Entry& a, const Entry& b) const;
    Entry make_entry(LengthTuple l) const;
    std::optional<LengthTuple> pop();

    PLBox box_;
    FairnessSpec spec_;
    bool exhaustive_ = true;
    std::vector<Entry> order_; // sorted (exhaustive) or heap storage
    std::size_t cursor_ = 0;
    std::set<LengthTuple> enqueued_;
};

/// Uniform draw among unvisited, not-infeasible tuples of the box; marks the
/// result visited. Empty when none is left (or none found for huge boxes).
std::optional<LengthTuple> sample_random(const PLBox& box, SearchFrontier& frontier, std::mt19937_64& rng);

} // namespace fairfly
