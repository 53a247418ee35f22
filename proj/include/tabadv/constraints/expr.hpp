#ifndef TABADV_CONSTRAINTS_EXPR_HPP
#define TABADV_CONSTRAINTS_EXPR_HPP

#include <bit>
#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "tabadv/core/format.hpp"
#include "tabadv/data/schema.hpp"

namespace tabadv {

enum class ArithOp { add, sub, mul, div };
enum class Relation { lt, le, eq, ne, ge, gt };

inline const char* symbol(ArithOp op) {
    switch (op) {
    case ArithOp::add: return "+";
    case ArithOp::sub: return "-";
    case ArithOp::mul: return "*";
    case ArithOp::div: return "/";
    }
    return "?";
}

inline const char* symbol(Relation r) {
    switch (r) {
    case Relation::lt: return "<";
    case Relation::le: return "<=";
    case Relation::eq: return "=";
    case Relation::ne: return "!=";
    case Relation::ge: return ">=";
    case Relation::gt: return ">";
    }
    return "?";
}

// Numeric expressions (psi in the grammar). Trees are immutable and shared.

struct NumericExpr;
using NumericPtr = std::shared_ptr<const NumericExpr>;

struct Constant {
    double value;
};

/// Current value of a feature of the candidate.
struct FeatureRef {
    std::size_t index;
};

/// Value of a feature in the unperturbed input.
struct OriginalRef {
    std::size_t index;
};

struct BinaryOp {
    ArithOp op;
    NumericPtr lhs;
    NumericPtr rhs;
};

struct NumericExpr {
    std::variant<Constant, FeatureRef, OriginalRef, BinaryOp> node;
};

inline NumericPtr constant(double v) { return std::make_shared<const NumericExpr>(NumericExpr{Constant{v}}); }
inline NumericPtr feature(std::size_t i) { return std::make_shared<const NumericExpr>(NumericExpr{FeatureRef{i}}); }
inline NumericPtr original(std::size_t i) { return std::make_shared<const NumericExpr>(NumericExpr{OriginalRef{i}}); }
inline NumericPtr binary(ArithOp op, NumericPtr l, NumericPtr r) {
    return std::make_shared<const NumericExpr>(NumericExpr{BinaryOp{op, std::move(l), std::move(r)}});
}

// Constraint formulae (omega in the grammar).

struct ConstraintExpr;
using ConstraintPtr = std::shared_ptr<const ConstraintExpr>;

struct AndNode {
    ConstraintPtr lhs;
    ConstraintPtr rhs;
};

struct OrNode {
    ConstraintPtr lhs;
    ConstraintPtr rhs;
};

struct CompareNode {
    Relation rel;
    NumericPtr lhs;
    NumericPtr rhs;
};

struct MembershipNode {
    NumericPtr expr;
    std::vector<NumericPtr> set; ///< non-empty
};

struct ConstraintExpr {
    std::variant<AndNode, OrNode, CompareNode, MembershipNode> node;
};

inline ConstraintPtr conj(ConstraintPtr l, ConstraintPtr r) {
    return std::make_shared<const ConstraintExpr>(ConstraintExpr{AndNode{std::move(l), std::move(r)}});
}
inline ConstraintPtr disj(ConstraintPtr l, ConstraintPtr r) {
    return std::make_shared<const ConstraintExpr>(ConstraintExpr{OrNode{std::move(l), std::move(r)}});
}
inline ConstraintPtr compare(Relation rel, NumericPtr l, NumericPtr r) {
    return std::make_shared<const ConstraintExpr>(ConstraintExpr{CompareNode{rel, std::move(l), std::move(r)}});
}
inline ConstraintPtr membership(NumericPtr e, std::vector<NumericPtr> set) {
    if (set.empty()) {
        throw ConfigError("membership set must be non-empty");
    }
    return std::make_shared<const ConstraintExpr>(ConstraintExpr{MembershipNode{std::move(e), std::move(set)}});
}

// Structural equality. Constants compare bitwise so that -0.0 != 0.0 and the
// printer/parser round trip is checked exactly.

inline bool same(const NumericExpr& a, const NumericExpr& b);

inline bool same(const NumericPtr& a, const NumericPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return same(*a, *b);
}

inline bool same(const NumericExpr& a, const NumericExpr& b) {
    if (a.node.index() != b.node.index()) {
        return false;
    }
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Constant>) {
                return std::bit_cast<std::uint64_t>(x.value) == std::bit_cast<std::uint64_t>(y.value);
            } else if constexpr (std::is_same_v<T, BinaryOp>) {
                return x.op == y.op && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
            } else {
                return x.index == y.index;
            }
        },
        a.node);
}

inline bool same(const ConstraintExpr& a, const ConstraintExpr& b);

inline bool same(const ConstraintPtr& a, const ConstraintPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return same(*a, *b);
}

inline bool same(const ConstraintExpr& a, const ConstraintExpr& b) {
    if (a.node.index() != b.node.index()) {
        return false;
    }
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, CompareNode>) {
                return x.rel == y.rel && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
            } else if constexpr (std::is_same_v<T, MembershipNode>) {
                if (!same(x.expr, y.expr) || x.set.size() != y.set.size()) return false;
                for (std::size_t i = 0; i < x.set.size(); ++i) {
                    if (!same(x.set[i], y.set[i])) return false;
                }
                return true;
            } else {
                return same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
            }
        },
        a.node);
}

// Queries over trees.

template <typename Fn>
void for_each_feature(const NumericExpr& e, Fn&& fn) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FeatureRef>) {
                fn(n.index);
            } else if constexpr (std::is_same_v<T, BinaryOp>) {
                for_each_feature(*n.lhs, fn);
                for_each_feature(*n.rhs, fn);
            }
        },
        e.node);
}

/// Largest feature or original-value index referenced, plus one (0 if none).
inline std::size_t arity_needed(const NumericExpr& e) {
    return std::visit(
        [](const auto& n) -> std::size_t {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FeatureRef> || std::is_same_v<T, OriginalRef>) {
                return n.index + 1;
            } else if constexpr (std::is_same_v<T, BinaryOp>) {
                return std::max(arity_needed(*n.lhs), arity_needed(*n.rhs));
            } else {
                return 0;
            }
        },
        e.node);
}

inline std::size_t arity_needed(const ConstraintExpr& c) {
    return std::visit(
        [](const auto& n) -> std::size_t {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, CompareNode>) {
                return std::max(arity_needed(*n.lhs), arity_needed(*n.rhs));
            } else if constexpr (std::is_same_v<T, MembershipNode>) {
                std::size_t m = arity_needed(*n.expr);
                for (const auto& s : n.set) m = std::max(m, arity_needed(*s));
                return m;
            } else {
                return std::max(arity_needed(*n.lhs), arity_needed(*n.rhs));
            }
        },
        c.node);
}

inline bool contains_division(const NumericExpr& e) {
    if (const auto* b = std::get_if<BinaryOp>(&e.node)) {
        return b->op == ArithOp::div || contains_division(*b->lhs) || contains_division(*b->rhs);
    }
    return false;
}

inline bool contains_division(const ConstraintExpr& c) {
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, CompareNode>) {
                return contains_division(*n.lhs) || contains_division(*n.rhs);
            } else if constexpr (std::is_same_v<T, MembershipNode>) {
                bool any = contains_division(*n.expr);
                for (const auto& s : n.set) any = any || contains_division(*s);
                return any;
            } else {
                return contains_division(*n.lhs) || contains_division(*n.rhs);
            }
        },
        c.node);
}

// Canonical printing: every binary operation and every and/or is wrapped in
// parentheses, so the output re-parses to the same tree.

inline std::string to_string(const NumericExpr& e, const Schema& schema) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return format_double(n.value);
            } else if constexpr (std::is_same_v<T, FeatureRef>) {
                return "F[" + schema[n.index].name + "]";
            } else if constexpr (std::is_same_v<T, OriginalRef>) {
                return "X0[" + schema[n.index].name + "]";
            } else {
                return "(" + to_string(*n.lhs, schema) + " " + symbol(n.op) + " " + to_string(*n.rhs, schema) + ")";
            }
        },
        e.node);
}

inline std::string to_string(const ConstraintExpr& c, const Schema& schema) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AndNode>) {
                return "(" + to_string(*n.lhs, schema) + " and " + to_string(*n.rhs, schema) + ")";
            } else if constexpr (std::is_same_v<T, OrNode>) {
                return "(" + to_string(*n.lhs, schema) + " or " + to_string(*n.rhs, schema) + ")";
            } else if constexpr (std::is_same_v<T, CompareNode>) {
                return to_string(*n.lhs, schema) + " " + symbol(n.rel) + " " + to_string(*n.rhs, schema);
            } else {
                std::string s = to_string(*n.expr, schema) + " in {";
                for (std::size_t i = 0; i < n.set.size(); ++i) {
                    if (i) s += ", ";
                    s += to_string(*n.set[i], schema);
                }
                return s + "}";
            }
        },
        c.node);
}

} // namespace tabadv

#endif
