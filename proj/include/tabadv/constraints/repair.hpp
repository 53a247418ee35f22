#ifndef TABADV_CONSTRAINTS_REPAIR_HPP
#define TABADV_CONSTRAINTS_REPAIR_HPP

#include <cmath>
#include <span>
#include <vector>

#include "tabadv/constraints/check.hpp"

namespace tabadv {

namespace detail {

/// Moves an integral-typed value onto the grid, rounding toward `origin`.
inline double round_toward(const FeatureSpec& f, double origin, double v) {
    if (f.type == FeatureType::discrete) {
        const double nearest = std::round(v);
        if (within_tol(v, nearest)) return nearest;
        return v > origin ? std::floor(v) : std::ceil(v);
    }
    // categorical: level codes form the grid
    for (double l : f.levels) {
        if (within_tol(v, l)) return l;
    }
    if (v > origin) {
        double best = f.levels.front();
        for (double l : f.levels) {
            if (l <= v) best = l;
        }
        return best;
    }
    double best = f.levels.back();
    for (auto it = f.levels.rbegin(); it != f.levels.rend(); ++it) {
        if (*it >= v) best = *it;
    }
    return best;
}

} // namespace detail

/// Rounds discrete and categorical features in the inverse direction of the
/// perturbation. Rounding toward x0 never leaves the bounds or grows |delta|.
inline void repair_types(const Schema& schema, std::span<const double> x0, std::span<double> x) {
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& f = schema[i];
        if (f.mutable_ && f.is_integral_type() && x[i] != x0[i]) {
            x[i] = detail::round_toward(f, x0[i], x[i]);
        }
    }
}

/// Sets each mutable assignment target to the value of its defining
/// expression, in dependency order.
inline void repair_assignments(const ConstraintSet& set, std::span<const double> x0, std::span<double> x) {
    const Schema& schema = set.schema();
    for (const auto& a : set.assignments()) {
        if (!schema[a.target].mutable_) continue;
        detail::with_constraint_name(set[a.constraint], [&] {
            x[a.target] = evaluate(*a.rhs, x, x0);
            return 0;
        });
    }
}

struct RepairOptions {
    bool types = true;
    bool relations = true;
};

/// Repair operator R. Vectors are in original units; idempotent.
inline std::vector<double> repair(std::span<const double> x0, std::span<const double> x_adv, const ConstraintSet& set,
                                  RepairOptions options = {}) {
    detail::check_arity(set, x_adv, x0);
    std::vector<double> x(x_adv.begin(), x_adv.end());
    if (options.types) repair_types(set.schema(), x0, x);
    if (options.relations) repair_assignments(set, x0, x);
    return x;
}

} // namespace tabadv

#endif
