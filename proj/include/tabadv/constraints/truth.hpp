#ifndef TABADV_CONSTRAINTS_TRUTH_HPP
#define TABADV_CONSTRAINTS_TRUTH_HPP

#include <cmath>
#include <span>

#include "tabadv/constraints/constraint_set.hpp"

namespace tabadv {

// Boolean reading of the constraint language. Written as a separate tree
// walk (no penalties involved) so it can audit the penalty path.

namespace detail {

inline double truth_value(const NumericExpr& e, std::span<const double> x, std::span<const double> x0) {
    if (const auto* c = std::get_if<Constant>(&e.node)) return c->value;
    if (const auto* f = std::get_if<FeatureRef>(&e.node)) return x[f->index];
    if (const auto* o = std::get_if<OriginalRef>(&e.node)) return x0[o->index];
    const auto& b = std::get<BinaryOp>(e.node);
    const double l = truth_value(*b.lhs, x, x0);
    const double r = truth_value(*b.rhs, x, x0);
    if (b.op == ArithOp::add) return l + r;
    if (b.op == ArithOp::sub) return l - r;
    if (b.op == ArithOp::mul) return l * r;
    if (r == 0.0) throw EvaluationError("division by zero");
    return l / r;
}

} // namespace detail

/// Whether `c` holds at x. Strict comparisons require a gap of at least
/// tau; != requires the operands to differ by at least tau. Each atomic
/// comparison may miss by at most `slack` (0 means exact).
inline bool holds(const ConstraintExpr& c, std::span<const double> x, std::span<const double> x0, double tau,
                  double slack = 0.0) {
    if (const auto* a = std::get_if<AndNode>(&c.node)) {
        return holds(*a->lhs, x, x0, tau, slack) && holds(*a->rhs, x, x0, tau, slack);
    }
    if (const auto* o = std::get_if<OrNode>(&c.node)) {
        return holds(*o->lhs, x, x0, tau, slack) || holds(*o->rhs, x, x0, tau, slack);
    }
    if (const auto* m = std::get_if<MembershipNode>(&c.node)) {
        const double v = detail::truth_value(*m->expr, x, x0);
        for (const auto& s : m->set) {
            if (std::abs(v - detail::truth_value(*s, x, x0)) <= slack) return true;
        }
        return false;
    }
    const auto& cmp = std::get<CompareNode>(c.node);
    const double l = detail::truth_value(*cmp.lhs, x, x0);
    const double r = detail::truth_value(*cmp.rhs, x, x0);
    switch (cmp.rel) {
    case Relation::le: return l - r <= slack;
    case Relation::ge: return r - l <= slack;
    case Relation::lt: return l - r <= slack - tau;
    case Relation::gt: return r - l <= slack - tau;
    case Relation::eq: return std::abs(l - r) <= slack;
    case Relation::ne: return std::abs(l - r) >= tau - slack;
    }
    return false;
}

} // namespace tabadv

#endif
