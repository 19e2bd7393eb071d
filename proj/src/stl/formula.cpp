#include "fairfly/stl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fairfly::stl {

double AtomicPredicate::value(std::span<const double> xa, std::span<const double> xb) const {
    switch (kind) {
    case AtomKind::Halfspace: {
        if (coeffs.size() != xa.size()) {
            throw std::invalid_argument("halfspace dimension does not match the state");
        }
        double dot = 0.0;
        for (std::size_t i = 0; i < xa.size(); ++i) {
            dot += coeffs[i] * xa[i];
        }
        return dot - offset;
    }
    case AtomKind::InBox:
    case AtomKind::OutBox: {
        if (box.dim() != xa.size()) {
            throw std::invalid_argument("region '" + box.name + "' dimension does not match the state");
        }
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < xa.size(); ++i) {
            margin = std::min({margin, xa[i] - box.lo[i], box.hi[i] - xa[i]});
        }
        return kind == AtomKind::InBox ? margin : -margin;
    }
    case AtomKind::Separation: {
        if (xa.size() != xb.size()) {
            throw std::invalid_argument("separation between states of different dimension");
        }
        double sq = 0.0;
        for (std::size_t i = 0; i < xa.size(); ++i) {
            const double d = xa[i] - xb[i];
            sq += d * d;
        }
        return std::sqrt(sq) - offset;
    }
    }
    return 0.0;
}

AtomicPredicate halfspace(int uav, std::vector<double> coeffs, double offset) {
    AtomicPredicate p;
    p.kind = AtomKind::Halfspace;
    p.uav_a = uav;
    p.coeffs = std::move(coeffs);
    p.offset = offset;
    return p;
}

AtomicPredicate in_box(int uav, Box box) {
    if (box.lo.size() != box.hi.size()) {
        throw std::invalid_argument("box corners differ in dimension");
    }
    AtomicPredicate p;
    p.kind = AtomKind::InBox;
    p.uav_a = uav;
    p.box = std::move(box);
    return p;
}

AtomicPredicate out_box(int uav, Box box) {
    AtomicPredicate p = in_box(uav, std::move(box));
    p.kind = AtomKind::OutBox;
    return p;
}

AtomicPredicate separation(int uav_a, int uav_b, double distance) {
    if (uav_a == uav_b) {
        throw std::invalid_argument("separation needs two distinct UAVs");
    }
    AtomicPredicate p;
    p.kind = AtomKind::Separation;
    p.uav_a = uav_a;
    p.uav_b = uav_b;
    p.offset = distance;
    return p;
}

struct Formula::Node {
    Op op = Op::True;
    Interval interval;
    AtomicPredicate predicate;
    FormulaList children;
    std::vector<int> uavs;
    std::size_t size = 1;
};

namespace {

void check_interval(const Interval& interval) {
    if (interval.lo < 0 || interval.hi < interval.lo) {
        throw std::invalid_argument("interval [" + std::to_string(interval.lo) + "," +
                                    std::to_string(interval.hi) + "] must satisfy 0 <= lo <= hi");
    }
}

} // namespace

Formula::Formula() : Formula(truth()) {}

Formula::Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Formula Formula::truth() {
    static const auto node = std::make_shared<const Node>();
    return Formula(node);
}

Formula Formula::falsity() { return negate(truth()); }

Formula Formula::atom(AtomicPredicate predicate) {
    if (predicate.uav_a < 0 || (predicate.kind == AtomKind::Separation && predicate.uav_b < 0)) {
        throw std::invalid_argument("atomic predicate references a negative UAV index");
    }
    auto node = std::make_shared<Node>();
    node->op = Op::Atom;
    node->uavs.push_back(predicate.uav_a);
    if (predicate.kind == AtomKind::Separation) {
        node->uavs.push_back(predicate.uav_b);
        std::sort(node->uavs.begin(), node->uavs.end());
    }
    node->predicate = std::move(predicate);
    return Formula(std::move(node));
}

static std::vector<int> merge_uavs(const FormulaList& children) {
    std::vector<int> out;
    for (const auto& c : children) {
        out.insert(out.end(), c.uavs().begin(), c.uavs().end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Formula Formula::negate(Formula child) {
    auto node = std::make_shared<Node>();
    node->op = Op::Not;
    node->uavs = child.uavs();
    node->size = 1 + child.size();
    node->children.push_back(std::move(child));
    return Formula(std::move(node));
}

Formula Formula::conj(FormulaList children) {
    if (children.empty()) {
        return truth();
    }
    if (children.size() == 1) {
        return children.front();
    }
    auto node = std::make_shared<Node>();
    node->op = Op::And;
    node->uavs = merge_uavs(children);
    for (const auto& c : children) {
        node->size += c.size();
    }
    node->children = std::move(children);
    return Formula(std::move(node));
}

Formula Formula::disj(FormulaList children) {
    if (children.empty()) {
        return falsity();
    }
    if (children.size() == 1) {
        return children.front();
    }
    auto node = std::make_shared<Node>();
    node->op = Op::Or;
    node->uavs = merge_uavs(children);
    for (const auto& c : children) {
        node->size += c.size();
    }
    node->children = std::move(children);
    return Formula(std::move(node));
}

Formula Formula::eventually(Interval interval, Formula child) {
    check_interval(interval);
    auto node = std::make_shared<Node>();
    node->op = Op::Eventually;
    node->interval = interval;
    node->uavs = child.uavs();
    node->size = 1 + child.size();
    node->children.push_back(std::move(child));
    return Formula(std::move(node));
}

Formula Formula::always(Interval interval, Formula child) {
    check_interval(interval);
    auto node = std::make_shared<Node>();
    node->op = Op::Always;
    node->interval = interval;
    node->uavs = child.uavs();
    node->size = 1 + child.size();
    node->children.push_back(std::move(child));
    return Formula(std::move(node));
}

Formula Formula::until(Interval interval, Formula lhs, Formula rhs) {
    check_interval(interval);
    auto node = std::make_shared<Node>();
    node->op = Op::Until;
    node->interval = interval;
    node->children = {std::move(lhs), std::move(rhs)};
    node->uavs = merge_uavs(node->children);
    node->size = 1 + node->children[0].size() + node->children[1].size();
    return Formula(std::move(node));
}

Op Formula::op() const { return node_->op; }
const Interval& Formula::interval() const { return node_->interval; }
const AtomicPredicate& Formula::predicate() const { return node_->predicate; }
const FormulaList& Formula::children() const { return node_->children; }
const std::vector<int>& Formula::uavs() const { return node_->uavs; }
std::size_t Formula::size() const { return node_->size; }

bool Formula::operator==(const Formula& other) const {
    if (node_ == other.node_) {
        return true;
    }
    if (op() != other.op() || children().size() != other.children().size()) {
        return false;
    }
    switch (op()) {
    case Op::Atom:
        return predicate() == other.predicate();
    case Op::Eventually:
    case Op::Always:
    case Op::Until:
        if (interval() != other.interval()) {
            return false;
        }
        break;
    default:
        break;
    }
    for (std::size_t i = 0; i < children().size(); ++i) {
        if (!(children()[i] == other.children()[i])) {
            return false;
        }
    }
    return true;
}

int hrz(const Formula& f) {
    switch (f.op()) {
    case Op::True:
    case Op::Atom:
        return 0;
    case Op::Not:
        return hrz(f.child());
    case Op::And:
    case Op::Or: {
        int h = 0;
        for (const auto& c : f.children()) {
            h = std::max(h, hrz(c));
        }
        return h;
    }
    case Op::Eventually:
    case Op::Always:
        return f.interval().hi + hrz(f.child());
    case Op::Until:
        return f.interval().hi + std::max(hrz(f.child(0)), hrz(f.child(1)));
    }
    return 0;
}

namespace {

Formula nnf(const Formula& f, bool negated) {
    switch (f.op()) {
    case Op::True:
    case Op::Atom:
        return negated ? Formula::negate(f) : f;
    case Op::Not:
        return nnf(f.child(), !negated);
    case Op::And:
    case Op::Or: {
        FormulaList kids;
        kids.reserve(f.children().size());
        for (const auto& c : f.children()) {
            kids.push_back(nnf(c, negated));
        }
        const bool as_and = (f.op() == Op::And) != negated;
        return as_and ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
    }
    case Op::Eventually:
        return negated ? Formula::always(f.interval(), nnf(f.child(), true))
                       : Formula::eventually(f.interval(), nnf(f.child(), false));
    case Op::Always:
        return negated ? Formula::eventually(f.interval(), nnf(f.child(), true))
                       : Formula::always(f.interval(), nnf(f.child(), false));
    case Op::Until: {
        if (!negated) {
            return Formula::until(f.interval(), nnf(f.child(0), false), nnf(f.child(1), false));
        }
        // Discrete bounded until has no primitive dual here, so expand per offset j:
        //   !(a U[lo,hi] b) = AND_j ( G[j,j] !b  |  OR_{0<i<j} F[i,i] !a )
        // Single-instant windows clip to each side's own availability, matching
        // the evaluation rule for until.
        const Formula not_a = nnf(f.child(0), true);
        const Formula not_b = nnf(f.child(1), true);
        FormulaList terms;
        for (int j = f.interval().lo; j <= f.interval().hi; ++j) {
            FormulaList alts{Formula::always({j, j}, not_b)};
            for (int i = 1; i < j; ++i) {
                alts.push_back(Formula::eventually({i, i}, not_a));
            }
            terms.push_back(Formula::disj(std::move(alts)));
        }
        return Formula::conj(std::move(terms));
    }
    }
    return f;
}

} // namespace

Formula normalize_nnf(const Formula& formula) { return nnf(formula, false); }

} // namespace fairfly::stl
