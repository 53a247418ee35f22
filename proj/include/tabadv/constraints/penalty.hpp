#ifndef TABADV_CONSTRAINTS_PENALTY_HPP
#define TABADV_CONSTRAINTS_PENALTY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabadv/constraints/constraint_set.hpp"

namespace tabadv {

// All functions here take feature vectors in original units. `x` is the
// candidate, `x0` the unperturbed input read by X0[...] references.

inline double evaluate(const NumericExpr& e, std::span<const double> x, std::span<const double> x0) {
    return std::visit(
        [&](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, FeatureRef>) {
                return x[n.index];
            } else if constexpr (std::is_same_v<T, OriginalRef>) {
                return x0[n.index];
            } else {
                const double a = evaluate(*n.lhs, x, x0);
                const double b = evaluate(*n.rhs, x, x0);
                switch (n.op) {
                case ArithOp::add: return a + b;
                case ArithOp::sub: return a - b;
                case ArithOp::mul: return a * b;
                case ArithOp::div:
                    if (b == 0.0) {
                        throw EvaluationError("division by zero");
                    }
                    return a / b;
                }
                return 0.0;
            }
        },
        e.node);
}

/// Adds scale * d(e)/dx into grad.
inline void accumulate_gradient(const NumericExpr& e, std::span<const double> x, std::span<const double> x0,
                                double scale, std::span<double> grad) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FeatureRef>) {
                grad[n.index] += scale;
            } else if constexpr (std::is_same_v<T, BinaryOp>) {
                switch (n.op) {
                case ArithOp::add:
                    accumulate_gradient(*n.lhs, x, x0, scale, grad);
                    accumulate_gradient(*n.rhs, x, x0, scale, grad);
                    break;
                case ArithOp::sub:
                    accumulate_gradient(*n.lhs, x, x0, scale, grad);
                    accumulate_gradient(*n.rhs, x, x0, -scale, grad);
                    break;
                case ArithOp::mul: {
                    const double a = evaluate(*n.lhs, x, x0);
                    const double b = evaluate(*n.rhs, x, x0);
                    accumulate_gradient(*n.lhs, x, x0, scale * b, grad);
                    accumulate_gradient(*n.rhs, x, x0, scale * a, grad);
                    break;
                }
                case ArithOp::div: {
                    const double a = evaluate(*n.lhs, x, x0);
                    const double b = evaluate(*n.rhs, x, x0);
                    if (b == 0.0) {
                        throw EvaluationError("division by zero");
                    }
                    accumulate_gradient(*n.lhs, x, x0, scale / b, grad);
                    accumulate_gradient(*n.rhs, x, x0, -scale * a / (b * b), grad);
                    break;
                }
                }
            }
        },
        e.node);
}

namespace detail {

inline double sign(double u) { return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0); }

/// Left minus right operand of a comparison after rewriting >= and > as
/// swapped <= and <.
inline std::pair<const NumericExpr*, const NumericExpr*> oriented(const CompareNode& c) {
    if (c.rel == Relation::ge || c.rel == Relation::gt) {
        return {c.rhs.get(), c.lhs.get()};
    }
    return {c.lhs.get(), c.rhs.get()};
}

} // namespace detail

/// Distance-to-satisfaction of one formula: zero exactly when it holds.
inline double penalty(const ConstraintExpr& c, std::span<const double> x, std::span<const double> x0, double tau) {
    return std::visit(
        [&](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AndNode>) {
                return penalty(*n.lhs, x, x0, tau) + penalty(*n.rhs, x, x0, tau);
            } else if constexpr (std::is_same_v<T, OrNode>) {
                return std::min(penalty(*n.lhs, x, x0, tau), penalty(*n.rhs, x, x0, tau));
            } else if constexpr (std::is_same_v<T, MembershipNode>) {
                const double v = evaluate(*n.expr, x, x0);
                double best = std::abs(v - evaluate(*n.set.front(), x, x0));
                for (std::size_t i = 1; i < n.set.size(); ++i) {
                    best = std::min(best, std::abs(v - evaluate(*n.set[i], x, x0)));
                }
                return std::isnan(best) ? std::numeric_limits<double>::infinity() : best;
            } else {
                auto [l, r] = detail::oriented(n);
                const double u = evaluate(*l, x, x0) - evaluate(*r, x, x0);
                if (std::isnan(u)) {
                    return std::numeric_limits<double>::infinity();
                }
                switch (n.rel) {
                case Relation::le:
                case Relation::ge: return std::max(0.0, u);
                case Relation::lt:
                case Relation::gt: return std::max(0.0, u + tau);
                case Relation::eq: return std::abs(u);
                case Relation::ne: return std::max(0.0, tau - std::abs(u));
                }
                return 0.0;
            }
        },
        c.node);
}

/// Adds a subgradient of penalty(c) into grad. At kinks the zero branch is
/// taken; min-reductions resolve ties to the lowest index.
inline void accumulate_penalty_gradient(const ConstraintExpr& c, std::span<const double> x,
                                        std::span<const double> x0, double tau, std::span<double> grad) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AndNode>) {
                accumulate_penalty_gradient(*n.lhs, x, x0, tau, grad);
                accumulate_penalty_gradient(*n.rhs, x, x0, tau, grad);
            } else if constexpr (std::is_same_v<T, OrNode>) {
                const bool left = penalty(*n.lhs, x, x0, tau) <= penalty(*n.rhs, x, x0, tau);
                accumulate_penalty_gradient(left ? *n.lhs : *n.rhs, x, x0, tau, grad);
            } else if constexpr (std::is_same_v<T, MembershipNode>) {
                const double v = evaluate(*n.expr, x, x0);
                std::size_t best = 0;
                double best_dist = std::abs(v - evaluate(*n.set.front(), x, x0));
                for (std::size_t i = 1; i < n.set.size(); ++i) {
                    const double d = std::abs(v - evaluate(*n.set[i], x, x0));
                    if (d < best_dist) {
                        best_dist = d;
                        best = i;
                    }
                }
                const double s = detail::sign(v - evaluate(*n.set[best], x, x0));
                if (s != 0.0) {
                    accumulate_gradient(*n.expr, x, x0, s, grad);
                    accumulate_gradient(*n.set[best], x, x0, -s, grad);
                }
            } else {
                auto [l, r] = detail::oriented(n);
                const double u = evaluate(*l, x, x0) - evaluate(*r, x, x0);
                double s = 0.0;
                switch (n.rel) {
                case Relation::le:
                case Relation::ge: s = u > 0.0 ? 1.0 : 0.0; break;
                case Relation::lt:
                case Relation::gt: s = u + tau > 0.0 ? 1.0 : 0.0; break;
                case Relation::eq: s = detail::sign(u); break;
                case Relation::ne: s = tau - std::abs(u) > 0.0 ? -detail::sign(u) : 0.0; break;
                }
                if (s != 0.0) {
                    accumulate_gradient(*l, x, x0, s, grad);
                    accumulate_gradient(*r, x, x0, -s, grad);
                }
            }
        },
        c.node);
}

struct PenaltyReport {
    std::vector<std::pair<std::string, double>> per_constraint;
    double total = 0.0; ///< g(x)
};

namespace detail {

template <typename Fn>
auto with_constraint_name(const NamedConstraint& c, Fn&& fn) {
    try {
        return fn();
    } catch (const EvaluationError& e) {
        throw EvaluationError("constraint '" + c.name + "': " + e.what());
    }
}

inline void check_arity(const ConstraintSet& set, std::span<const double> x, std::span<const double> x0) {
    if (x.size() != set.schema().size() || x0.size() != set.schema().size()) {
        throw ConfigError("feature vector arity does not match the schema");
    }
}

} // namespace detail

inline double penalty(const NamedConstraint& c, std::span<const double> x, std::span<const double> x0, double tau) {
    return detail::with_constraint_name(c, [&] { return penalty(*c.expr, x, x0, tau); });
}

inline PenaltyReport penalty_report(const ConstraintSet& set, std::span<const double> x, std::span<const double> x0) {
    detail::check_arity(set, x, x0);
    PenaltyReport report;
    report.per_constraint.reserve(set.size());
    for (const auto& c : set.constraints()) {
        const double p = penalty(c, x, x0, set.strict_margin());
        report.per_constraint.emplace_back(c.name, p);
        report.total += p;
    }
    return report;
}

/// g(x): sum of the per-constraint penalties.
inline double total_penalty(const ConstraintSet& set, std::span<const double> x, std::span<const double> x0) {
    detail::check_arity(set, x, x0);
    double total = 0.0;
    for (const auto& c : set.constraints()) {
        total += penalty(c, x, x0, set.strict_margin());
    }
    return total;
}

/// Subgradient of g with respect to x (original units).
inline std::vector<double> penalty_gradient(const ConstraintSet& set, std::span<const double> x,
                                            std::span<const double> x0) {
    detail::check_arity(set, x, x0);
    std::vector<double> grad(x.size(), 0.0);
    for (const auto& c : set.constraints()) {
        detail::with_constraint_name(c, [&] {
            accumulate_penalty_gradient(*c.expr, x, x0, set.strict_margin(), grad);
            return 0;
        });
    }
    return grad;
}

} // namespace tabadv

#endif
