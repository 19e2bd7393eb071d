#include "fairfly/stl.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

namespace fairfly::stl {

// ---------------------------------------------------------------------------
// Boolean semantics: direct recursion, kept independent of the robustness
// engine below.
// ---------------------------------------------------------------------------

namespace {

int availability(const Formula& f, const Trace& trace) {
    int end = INT_MAX;
    for (int u : f.uavs()) {
        end = std::min(end, trace.length(u));
    }
    return end;
}

double atom_value(const AtomicPredicate& p, const Trace& trace, int t) {
    if (p.kind == AtomKind::Separation) {
        return p.value(trace.at(p.uav_a, t), trace.at(p.uav_b, t));
    }
    return p.value(trace.at(p.uav_a, t));
}

void check_uavs(const Formula& f, const Trace& trace) {
    if (!f.uavs().empty() && f.uavs().back() >= trace.uav_count()) {
        throw std::invalid_argument("formula references UAV " + std::to_string(f.uavs().back() + 1) +
                                    " but the trace has " + std::to_string(trace.uav_count()));
    }
}

bool sat(const Formula& f, const Trace& trace, int t) {
    switch (f.op()) {
    case Op::True:
        return true;
    case Op::Atom:
        return atom_value(f.predicate(), trace, t) >= 0.0;
    case Op::Not:
        return !sat(f.child(), trace, t);
    case Op::And:
        return std::all_of(f.children().begin(), f.children().end(),
                           [&](const Formula& c) { return sat(c, trace, t); });
    case Op::Or:
        return std::any_of(f.children().begin(), f.children().end(),
                           [&](const Formula& c) { return sat(c, trace, t); });
    case Op::Eventually:
    case Op::Always: {
        const int end = std::min<long long>(static_cast<long long>(t) + f.interval().hi, availability(f, trace));
        const bool want = f.op() == Op::Eventually;
        for (int s = t + f.interval().lo; s <= end; ++s) {
            if (sat(f.child(), trace, s) == want) {
                return want;
            }
        }
        return !want;
    }
    case Op::Until: {
        const int end2 = std::min<long long>(static_cast<long long>(t) + f.interval().hi,
                                             availability(f.child(1), trace));
        const int end1 = availability(f.child(0), trace);
        for (int s = t + f.interval().lo; s <= end2; ++s) {
            if (!sat(f.child(1), trace, s)) {
                continue;
            }
            bool held = true;
            for (int r = t + 1; r < s && r <= end1; ++r) {
                if (!sat(f.child(0), trace, r)) {
                    held = false;
                    break;
                }
            }
            if (held) {
                return true;
            }
        }
        return false;
    }
    }
    return false;
}

} // namespace

bool satisfies(const Formula& formula, const Trace& trace, int t) {
    if (t < 0) {
        throw std::invalid_argument("evaluation time must be non-negative");
    }
    check_uavs(formula, trace);
    return sat(formula, trace, t);
}

// ---------------------------------------------------------------------------
// Robustness engine. Every node is evaluated as a signal over t = 0..T, with
// optional soft min/max. When a gradient is requested every computed value
// records its weighted inputs on a tape; ids are assigned in creation order
// so the reverse sweep is a plain backwards loop.
// ---------------------------------------------------------------------------

namespace {

struct CompiledNode {
    Op op = Op::True;
    Interval interval;
    const AtomicPredicate* predicate = nullptr;
    std::vector<int> kids;
    std::vector<int> uavs;
};

struct Edge {
    int source;
    double weight;
};

struct StateGrad {
    int uav;
    int k;
    int axis;
    double weight;
};

struct Term {
    double value;
    int id;
};

} // namespace

struct Evaluator::Impl {
    Formula formula;
    EvalOptions options;
    std::vector<CompiledNode> nodes; // post-order; root last

    // scratch
    bool record = false;
    double kappa = 0.0;
    std::vector<double> values;
    std::vector<std::pair<int, int>> edge_range;
    std::vector<std::pair<int, int>> grad_range;
    std::vector<Edge> edges;
    std::vector<StateGrad> state_grads;
    std::vector<int> node_time; // node * (T + 1) + t -> value id
    std::vector<Term> terms;
    std::vector<double> weights;
    std::vector<double> adjoint;
    std::vector<int> need; // last time index required per node
    int span = 0; // T + 1

    int compile(const Formula& f) {
        CompiledNode node;
        node.op = f.op();
        node.interval = f.interval();
        node.uavs = f.uavs();
        if (f.op() == Op::Atom) {
            node.predicate = &f.predicate();
        }
        for (const auto& c : f.children()) {
            node.kids.push_back(compile(c));
        }
        nodes.push_back(std::move(node));
        return static_cast<int>(nodes.size()) - 1;
    }

    int avail(const CompiledNode& n, const Trace& trace) const {
        int end = INT_MAX;
        for (int u : n.uavs) {
            end = std::min(end, trace.length(u));
        }
        return end;
    }

    int push_value(double v) {
        values.push_back(v);
        if (record) {
            const int e = static_cast<int>(edges.size());
            const int g = static_cast<int>(state_grads.size());
            edge_range.emplace_back(e, e);
            grad_range.emplace_back(g, g);
        }
        return static_cast<int>(values.size()) - 1;
    }

    // Appends a value computed from `terms` by (soft) max or min. Sentinels:
    // an absorbing one decides the result outright, a neutral one is dropped.
    int aggregate(bool take_max) {
        const double big = options.big;
        const double absorbing = take_max ? big : -big;
        for (const Term& term : terms) {
            if (take_max ? term.value >= big : term.value <= -big) {
                return push_value(absorbing);
            }
        }
        std::size_t kept = 0;
        for (const Term& term : terms) {
            if (take_max ? term.value > -big : term.value < big) {
                terms[kept++] = term;
            }
        }
        terms.resize(kept);
        if (terms.empty()) {
            return push_value(-absorbing);
        }
        const double sign = take_max ? 1.0 : -1.0;
        double best = terms[0].value;
        std::size_t arg = 0;
        for (std::size_t i = 1; i < terms.size(); ++i) {
            if (sign * terms[i].value > sign * best) {
                best = terms[i].value;
                arg = i;
            }
        }
        if (kappa <= 0.0 || terms.size() == 1) {
            const int id = push_value(best);
            if (record) {
                edges.push_back({terms[arg].id, 1.0});
                edge_range[id].second = static_cast<int>(edges.size());
            }
            return id;
        }
        weights.resize(terms.size());
        double total = 0.0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            weights[i] = std::exp(sign * kappa * (terms[i].value - best));
            total += weights[i];
        }
        const int id = push_value(best + sign * std::log(total) / kappa);
        if (record) {
            for (std::size_t i = 0; i < terms.size(); ++i) {
                edges.push_back({terms[i].id, weights[i] / total});
            }
            edge_range[id].second = static_cast<int>(edges.size());
        }
        return id;
    }

    int atom(const AtomicPredicate& p, const Trace& trace, int t) {
        const int dim = trace.dim();
        switch (p.kind) {
        case AtomKind::Halfspace: {
            const int id = push_value(p.value(trace.at(p.uav_a, t)));
            if (record) {
                const int k = std::min(t, trace.length(p.uav_a));
                for (int a = 0; a < dim; ++a) {
                    state_grads.push_back({p.uav_a, k, a, p.coeffs[a]});
                }
                grad_range[id].second = static_cast<int>(state_grads.size());
            }
            return id;
        }
        case AtomKind::Separation: {
            const auto xa = trace.at(p.uav_a, t);
            const auto xb = trace.at(p.uav_b, t);
            const int id = push_value(p.value(xa, xb));
            if (record) {
                const double norm = values[id] + p.offset;
                const int ka = std::min(t, trace.length(p.uav_a));
                const int kb = std::min(t, trace.length(p.uav_b));
                if (norm > 0.0) {
                    for (int a = 0; a < dim; ++a) {
                        const double g = (xa[a] - xb[a]) / norm;
                        state_grads.push_back({p.uav_a, ka, a, g});
                        state_grads.push_back({p.uav_b, kb, a, -g});
                    }
                }
                grad_range[id].second = static_cast<int>(state_grads.size());
            }
            return id;
        }
        case AtomKind::InBox:
        case AtomKind::OutBox: {
            const auto x = trace.at(p.uav_a, t);
            if (p.box.dim() != x.size()) {
                throw std::invalid_argument("region '" + p.box.name + "' dimension does not match the state");
            }
            const double sign = p.kind == AtomKind::InBox ? 1.0 : -1.0;
            if (kappa <= 0.0) {
                const int id = push_value(p.value(x));
                if (record) {
                    double best = std::numeric_limits<double>::infinity();
                    int axis = 0;
                    double dir = 1.0;
                    for (int a = 0; a < dim; ++a) {
                        if (x[a] - p.box.lo[a] < best) {
                            best = x[a] - p.box.lo[a];
                            axis = a;
                            dir = 1.0;
                        }
                        if (p.box.hi[a] - x[a] < best) {
                            best = p.box.hi[a] - x[a];
                            axis = a;
                            dir = -1.0;
                        }
                    }
                    state_grads.push_back({p.uav_a, std::min(t, trace.length(p.uav_a)), axis, sign * dir});
                    grad_range[id].second = static_cast<int>(state_grads.size());
                }
                return id;
            }
            // soft-min over the 2*dim face margins
            double best = std::numeric_limits<double>::infinity();
            for (int a = 0; a < dim; ++a) {
                best = std::min({best, x[a] - p.box.lo[a], p.box.hi[a] - x[a]});
            }
            double total = 0.0;
            weights.assign(2 * dim, 0.0);
            for (int a = 0; a < dim; ++a) {
                weights[2 * a] = std::exp(-kappa * (x[a] - p.box.lo[a] - best));
                weights[2 * a + 1] = std::exp(-kappa * (p.box.hi[a] - x[a] - best));
                total += weights[2 * a] + weights[2 * a + 1];
            }
            const int id = push_value(sign * (best - std::log(total) / kappa));
            if (record) {
                const int k = std::min(t, trace.length(p.uav_a));
                for (int a = 0; a < dim; ++a) {
                    const double g = (weights[2 * a] - weights[2 * a + 1]) / total;
                    state_grads.push_back({p.uav_a, k, a, sign * g});
                }
                grad_range[id].second = static_cast<int>(state_grads.size());
            }
            return id;
        }
        }
        return push_value(0.0);
    }

    int at(int node, int t) const { return node_time[static_cast<std::size_t>(node) * span + t]; }

    void run(const Trace& trace, int t0) {
        check_uavs(formula, trace);
        const int last = std::max(trace.max_length(), t0) + hrz(formula);
        span = last + 1;
        values.clear();
        edges.clear();
        state_grads.clear();
        edge_range.clear();
        grad_range.clear();
        node_time.assign(nodes.size() * static_cast<std::size_t>(span), -1);
        const double big = options.big;

        // Only the times some ancestor can reach are computed. Parents come
        // after their children in `nodes`, so one backwards pass settles it.
        need.assign(nodes.size(), -1);
        need.back() = t0;
        for (std::size_t ni = nodes.size(); ni-- > 0;) {
            const CompiledNode& n = nodes[ni];
            const int here = need[ni];
            if (here < 0) {
                continue;
            }
            auto reach = [&](int kid, long long upto) {
                need[kid] = std::max<long long>(need[kid], std::min<long long>(upto, last));
            };
            switch (n.op) {
            case Op::Eventually:
            case Op::Always:
                reach(n.kids[0], std::min<long long>(here + static_cast<long long>(n.interval.hi), avail(n, trace)));
                break;
            case Op::Until:
                reach(n.kids[0], std::min<long long>(here + static_cast<long long>(n.interval.hi) - 1,
                                                     avail(nodes[n.kids[0]], trace)));
                reach(n.kids[1], std::min<long long>(here + static_cast<long long>(n.interval.hi),
                                                     avail(nodes[n.kids[1]], trace)));
                break;
            default:
                for (int k : n.kids) {
                    reach(k, here);
                }
            }
        }

        for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
            const CompiledNode& n = nodes[ni];
            int* slot = &node_time[ni * span];
            const int count = need[ni] + 1;
            switch (n.op) {
            case Op::True:
                for (int t = 0; t < count; ++t) {
                    slot[t] = push_value(big);
                }
                break;
            case Op::Atom:
                for (int t = 0; t < count; ++t) {
                    slot[t] = atom(*n.predicate, trace, t);
                }
                break;
            case Op::Not:
                for (int t = 0; t < count; ++t) {
                    const int src = at(n.kids[0], t);
                    slot[t] = push_value(-values[src]);
                    if (record) {
                        edges.push_back({src, -1.0});
                        edge_range[slot[t]].second = static_cast<int>(edges.size());
                    }
                }
                break;
            case Op::And:
            case Op::Or:
                for (int t = 0; t < count; ++t) {
                    terms.clear();
                    for (int k : n.kids) {
                        const int src = at(k, t);
                        terms.push_back({values[src], src});
                    }
                    slot[t] = aggregate(n.op == Op::Or);
                }
                break;
            case Op::Eventually:
            case Op::Always: {
                const int end = std::min(avail(n, trace), last);
                for (int t = 0; t < count; ++t) {
                    terms.clear();
                    const long long hi = std::min<long long>(static_cast<long long>(t) + n.interval.hi, end);
                    for (long long s = t + n.interval.lo; s <= hi; ++s) {
                        const int src = at(n.kids[0], static_cast<int>(s));
                        terms.push_back({values[src], src});
                    }
                    slot[t] = aggregate(n.op == Op::Eventually);
                }
                break;
            }
            case Op::Until: {
                const int lhs = n.kids[0];
                const int rhs = n.kids[1];
                const int end1 = std::min(avail(nodes[lhs], trace), last);
                const int end2 = std::min(avail(nodes[rhs], trace), last);
                std::vector<int> candidates;
                for (int t = 0; t < count; ++t) {
                    candidates.clear();
                    const long long hi = std::min<long long>(static_cast<long long>(t) + n.interval.hi, end2);
                    for (long long s = t + n.interval.lo; s <= hi; ++s) {
                        terms.clear();
                        const int src = at(rhs, static_cast<int>(s));
                        terms.push_back({values[src], src});
                        for (int r = t + 1; r < s && r <= end1; ++r) {
                            const int held = at(lhs, r);
                            terms.push_back({values[held], held});
                        }
                        candidates.push_back(aggregate(false));
                    }
                    terms.clear();
                    for (int c : candidates) {
                        terms.push_back({values[c], c});
                    }
                    slot[t] = aggregate(true);
                }
                break;
            }
            }
        }
    }

    double evaluate(const Trace& trace, int t, double temperature, bool with_tape) {
        if (t < 0) {
            throw std::invalid_argument("evaluation time must be non-negative");
        }
        kappa = temperature;
        record = with_tape;
        run(trace, t);
        return values[at(static_cast<int>(nodes.size()) - 1, t)];
    }

    void backprop(const Trace& trace, int t, SmoothResult& result) {
        result.gradient.resize(trace.uav_count());
        for (int u = 0; u < trace.uav_count(); ++u) {
            result.gradient[u].assign(trace.samples(u).size(), 0.0);
        }
        adjoint.assign(values.size(), 0.0);
        const int root = at(static_cast<int>(nodes.size()) - 1, t);
        adjoint[root] = 1.0;
        const int dim = trace.dim();
        for (int id = root; id >= 0; --id) {
            const double a = adjoint[id];
            if (a == 0.0) {
                continue;
            }
            for (int e = edge_range[id].first; e < edge_range[id].second; ++e) {
                adjoint[edges[e].source] += a * edges[e].weight;
            }
            for (int g = grad_range[id].first; g < grad_range[id].second; ++g) {
                const StateGrad& sg = state_grads[g];
                result.gradient[sg.uav][static_cast<std::size_t>(sg.k) * dim + sg.axis] += a * sg.weight;
            }
        }
    }
};

Evaluator::Evaluator(Formula formula, EvalOptions options) : impl_(std::make_unique<Impl>()) {
    impl_->formula = std::move(formula);
    impl_->options = options;
    impl_->compile(impl_->formula);
}

Evaluator::Evaluator(Evaluator&&) noexcept = default;
Evaluator& Evaluator::operator=(Evaluator&&) noexcept = default;
Evaluator::~Evaluator() = default;

const Formula& Evaluator::formula() const { return impl_->formula; }

double Evaluator::robustness(const Trace& trace, int t) { return impl_->evaluate(trace, t, 0.0, false); }

double Evaluator::smooth_value(const Trace& trace, int t, double kappa) {
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("smoothing temperature must be positive");
    }
    return impl_->evaluate(trace, t, kappa, false);
}

double Evaluator::smooth(const Trace& trace, int t, double kappa, SmoothResult& result) {
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("smoothing temperature must be positive");
    }
    result.value = impl_->evaluate(trace, t, kappa, true);
    impl_->backprop(trace, t, result);
    return result.value;
}

double robustness(const Formula& formula, const Trace& trace, int t, const EvalOptions& options) {
    Evaluator ev(formula, options);
    return ev.robustness(trace, t);
}

SmoothResult smooth_robustness(const Formula& formula, const Trace& trace, int t, double kappa,
                               const EvalOptions& options) {
    Evaluator ev(formula, options);
    SmoothResult result;
    ev.smooth(trace, t, kappa, result);
    return result;
}

double smoothing_bound(const Formula& f, double kappa) {
    double below = 0.0;
    for (const auto& c : f.children()) {
        below = std::max(below, smoothing_bound(c, kappa));
    }
    std::size_t arity = 1;
    switch (f.op()) {
    case Op::Atom:
        if (f.predicate().kind == AtomKind::InBox || f.predicate().kind == AtomKind::OutBox) {
            arity = 2 * f.predicate().box.dim();
        }
        break;
    case Op::And:
    case Op::Or:
        arity = f.children().size();
        break;
    case Op::Eventually:
    case Op::Always:
        arity = static_cast<std::size_t>(f.interval().hi - f.interval().lo + 1);
        break;
    case Op::Until: {
        // outer max over the window, inner min over the rhs and the held lhs samples
        const auto window = static_cast<double>(f.interval().hi - f.interval().lo + 1);
        const auto held = static_cast<double>(std::max(1, f.interval().hi));
        return below + (std::log(window) + std::log(held)) / kappa;
    }
    default:
        break;
    }
    return below + std::log(static_cast<double>(arity)) / kappa;
}

} // namespace fairfly::stl
