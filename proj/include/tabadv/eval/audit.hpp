#ifndef TABADV_EVAL_AUDIT_HPP
#define TABADV_EVAL_AUDIT_HPP

#include <cmath>
#include <string>
#include <vector>

#include "tabadv/attacks/domain.hpp"
#include "tabadv/constraints/truth.hpp"

namespace tabadv {

/// Re-checks a claimed adversarial example without trusting the attack code:
/// relations through the boolean interpreter, bounds, types, immutables and
/// the L2 budget computed from scratch. Returns the problems found.
inline std::vector<std::string> audit_candidate(const AttackDomain& domain, const Example& ex,
                                                const std::vector<double>& scaled, double epsilon) {
    std::vector<std::string> problems;
    const Schema& schema = domain.schema();
    if (scaled.size() != schema.size()) {
        problems.push_back("arity mismatch");
        return problems;
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        const double d = scaled[i] - ex.scaled[i];
        sq += d * d;
    }
    if (!(std::sqrt(sq) <= epsilon + 1e-6)) problems.push_back("L2 distance exceeds the budget");

    const auto x = to_original(domain, ex, scaled);
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& f = schema[i];
        if (!f.mutable_ && x[i] != ex.original[i]) problems.push_back("immutable feature '" + f.name + "' changed");
        const double slack = 1e-9 * std::max(1.0, std::abs(x[i]));
        if (!(x[i] >= f.lower - slack && x[i] <= f.upper + slack)) {
            problems.push_back("feature '" + f.name + "' out of bounds");
        }
        if (f.type == FeatureType::discrete && std::abs(x[i] - std::round(x[i])) > slack) {
            problems.push_back("feature '" + f.name + "' not integral");
        }
        if (f.type == FeatureType::categorical &&
            std::none_of(f.levels.begin(), f.levels.end(), [&](double l) { return std::abs(x[i] - l) <= slack; })) {
            problems.push_back("feature '" + f.name + "' not a level");
        }
    }
    const auto& set = domain.constraints();
    for (const auto& c : set.constraints()) {
        if (!holds(*c.expr, x, ex.original, set.strict_margin(), set.satisfaction_tol())) {
            problems.push_back("constraint '" + c.name + "' does not hold");
        }
    }
    return problems;
}

} // namespace tabadv

#endif
