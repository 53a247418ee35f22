#ifndef TABADV_CONSTRAINTS_CHECK_HPP
#define TABADV_CONSTRAINTS_CHECK_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tabadv/constraints/penalty.hpp"

namespace tabadv {

/// Slack for bound and integrality checks, relative to max(1, |value|).
/// Candidates travel through the [0,1] scaling, which costs a few ulps.
inline constexpr double value_tol = 1e-9;

inline bool within_tol(double a, double b) {
    return std::abs(a - b) <= value_tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool is_integral(double v) { return within_tol(v, std::round(v)); }

inline bool is_level(const FeatureSpec& f, double v) {
    return std::any_of(f.levels.begin(), f.levels.end(), [&](double l) { return within_tol(v, l); });
}

inline bool in_bounds(const FeatureSpec& f, double v) {
    return (v >= f.lower || within_tol(v, f.lower)) && (v <= f.upper || within_tol(v, f.upper));
}

struct ValidityReport {
    std::vector<double> relation_penalty;    ///< per constraint, +inf when evaluation failed
    std::vector<bool> relation_ok;           ///< penalty <= satisfaction_tol
    std::vector<std::size_t> out_of_bounds;  ///< feature indices
    std::vector<std::size_t> type_violations;
    std::vector<std::string> failures;       ///< human-readable, one per problem
    bool valid = true;
};

/// Full domain check of x (original units): relation constraints, bounds,
/// integrality of discrete features and categorical levels.
inline ValidityReport check(std::span<const double> x, const ConstraintSet& set, std::span<const double> x0) {
    const Schema& schema = set.schema();
    detail::check_arity(set, x, x0);
    ValidityReport r;
    r.relation_penalty.reserve(set.size());
    for (const auto& c : set.constraints()) {
        double p;
        try {
            p = penalty(*c.expr, x, x0, set.strict_margin());
        } catch (const EvaluationError& e) {
            p = std::numeric_limits<double>::infinity();
            r.failures.push_back("constraint '" + c.name + "': " + e.what());
        }
        const bool ok = p <= set.satisfaction_tol();
        r.relation_penalty.push_back(p);
        r.relation_ok.push_back(ok);
        if (!ok && std::isfinite(p)) {
            r.failures.push_back("constraint '" + c.name + "' violated (penalty " + format_double(p) + ")");
        }
    }
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& f = schema[i];
        if (!std::isfinite(x[i]) || !in_bounds(f, x[i])) {
            r.out_of_bounds.push_back(i);
            r.failures.push_back("feature '" + f.name + "' = " + format_double(x[i]) + " outside [" +
                                 format_double(f.lower) + ", " + format_double(f.upper) + "]");
        }
        if (f.type == FeatureType::discrete && !is_integral(x[i])) {
            r.type_violations.push_back(i);
            r.failures.push_back("discrete feature '" + f.name + "' = " + format_double(x[i]) + " is not integral");
        } else if (f.type == FeatureType::categorical && !is_level(f, x[i])) {
            r.type_violations.push_back(i);
            r.failures.push_back("categorical feature '" + f.name + "' = " + format_double(x[i]) +
                                 " is not an allowed level");
        }
    }
    r.valid = r.failures.empty();
    return r;
}

/// Check against the vector itself as the original (for rows of a dataset).
inline ValidityReport check(std::span<const double> x, const ConstraintSet& set) { return check(x, set, x); }

} // namespace tabadv

#endif
