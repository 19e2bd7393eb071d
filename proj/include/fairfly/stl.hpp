#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fairfly::stl {

/// Stand-in for +/- infinity in robustness values. Values with magnitude at
/// or above this are treated as sentinels by every aggregation.
inline constexpr double kDefaultBig = 1e9;

struct Interval {
    int lo = 0;
    int hi = 0;

    bool operator==(const Interval&) const = default;
};

/// Axis-aligned box in position space.
struct Box {
    std::string name;
    std::vector<double> lo;
    std::vector<double> hi;

    bool operator==(const Box&) const = default;
    std::size_t dim() const { return lo.size(); }
};

enum class AtomKind { Halfspace, InBox, OutBox, Separation };

/// Real-valued function of the fleet state; the atom holds where it is >= 0.
///   Halfspace:  coeffs . x_a - offset
///   InBox:      min over axes of min(x - lo, hi - x)
///   OutBox:     negation of InBox
///   Separation: |x_a - x_b|_2 - offset
struct AtomicPredicate {
    AtomKind kind = AtomKind::Halfspace;
    int uav_a = 0;  // 0-based
    int uav_b = -1; // Separation only
    std::vector<double> coeffs;
    double offset = 0.0;
    Box box;
    std::string label; // named predicate ("p"); printed instead of the body when set

    bool operator==(const AtomicPredicate&) const = default;

    double value(std::span<const double> xa, std::span<const double> xb = {}) const;
};

AtomicPredicate halfspace(int uav, std::vector<double> coeffs, double offset);
AtomicPredicate in_box(int uav, Box box);
AtomicPredicate out_box(int uav, Box box);
AtomicPredicate separation(int uav_a, int uav_b, double distance);

enum class Op { True, Atom, Not, And, Or, Eventually, Always, Until };

class Formula;
using FormulaList = std::vector<Formula>;

/// Immutable STL syntax tree. Copies share structure.
class Formula {
public:
    Formula(); // True

    static Formula truth();
    static Formula falsity(); // Not(True)
    static Formula atom(AtomicPredicate predicate);
    static Formula negate(Formula child);
    static Formula conj(FormulaList children);
    static Formula disj(FormulaList children);
    static Formula eventually(Interval interval, Formula child);
    static Formula always(Interval interval, Formula child);
    static Formula until(Interval interval, Formula lhs, Formula rhs);

    Op op() const;
    const Interval& interval() const;
    const AtomicPredicate& predicate() const;
    const FormulaList& children() const;
    const Formula& child(std::size_t i = 0) const { return children().at(i); }

    /// Sorted 0-based indices of every UAV mentioned in this subtree.
    const std::vector<int>& uavs() const;
    /// Number of nodes in the tree.
    std::size_t size() const;

    bool operator==(const Formula& other) const;

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

/// Per-UAV position samples on a shared time grid. UAV n has samples
/// 0..length(n); lengths may differ.
class Trace {
public:
    Trace() = default;
    Trace(double dt, int dim, std::vector<std::vector<double>> positions);

    double dt() const { return dt_; }
    int dim() const { return dim_; }
    int uav_count() const { return static_cast<int>(positions_.size()); }
    /// Final time index of UAV n.
    int length(int uav) const;
    int max_length() const;
    /// Sample of UAV n at index k; indices past the end hold the last sample.
    std::span<const double> at(int uav, int k) const;

    const std::vector<double>& samples(int uav) const { return positions_.at(uav); }
    std::vector<std::vector<double>>& mutable_samples() { return positions_; }

private:
    double dt_ = 1.0;
    int dim_ = 0;
    std::vector<std::vector<double>> positions_; // flattened [k * dim + axis]
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Names resolvable in formula text.
struct ParseContext {
    std::vector<std::string> uav_names;         // index = UAV id; empty means u1..uN
    int uav_count = 0;                          // used when uav_names is empty
    std::map<std::string, Box> regions;
    std::map<std::string, AtomicPredicate> predicates;
    int dim = 3;

    int resolve_uav(std::string_view name) const;
    std::string uav_name(int index) const;
};

Formula parse(std::string_view text, const ParseContext& context);
std::string to_string(const Formula& formula, const ParseContext& context);
std::string to_string(const Formula& formula);

/// Largest time index an evaluation at t = 0 can touch.
int hrz(const Formula& formula);

/// Push negations down to atoms (and True).
Formula normalize_nnf(const Formula& formula);

struct EvalOptions {
    double big = kDefaultBig;
};

bool satisfies(const Formula& formula, const Trace& trace, int t = 0);
double robustness(const Formula& formula, const Trace& trace, int t = 0,
                  const EvalOptions& options = {});

struct SmoothResult {
    double value = 0.0;
    /// d value / d position, same layout as Trace samples.
    std::vector<std::vector<double>> gradient;
};

/// Log-sum-exp relaxation of robustness at temperature kappa, with gradient.
SmoothResult smooth_robustness(const Formula& formula, const Trace& trace, int t, double kappa,
                               const EvalOptions& options = {});

/// A formula compiled for repeated evaluation. Keeps scratch buffers, so use
/// one instance per thread.
class Evaluator {
public:
    explicit Evaluator(Formula formula, EvalOptions options = {});
    Evaluator(Evaluator&&) noexcept;
    Evaluator& operator=(Evaluator&&) noexcept;
    ~Evaluator();

    const Formula& formula() const;

    double robustness(const Trace& trace, int t = 0);
    double smooth_value(const Trace& trace, int t, double kappa);
    /// Fills result.gradient (resized to the trace layout) and returns the value.
    double smooth(const Trace& trace, int t, double kappa, SmoothResult& result);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Sum over nesting levels of ln(arity) / kappa: the worst-case gap between
/// smooth_robustness and robustness on sentinel-free instances.
double smoothing_bound(const Formula& formula, double kappa);

/// Interval enclosing the robustness of every trace whose UAV n position at
/// index k lies in reach[n][k]; reach[n].size() - 1 acts as length(n).
struct RobustnessBounds {
    double lo = 0.0;
    double hi = 0.0;
};
RobustnessBounds robustness_bounds(const Formula& formula, const std::vector<std::vector<Box>>& reach, int t = 0,
                                   const EvalOptions& options = {});

/// Reads `uav,k,x1..xd` rows. UAV ids in the file are 1-based.
Trace read_trace_csv(std::istream& in, double dt = 1.0);
void write_trace_csv(std::ostream& out, const Trace& trace);

} // namespace fairfly::stl
