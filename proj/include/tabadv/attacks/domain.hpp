#ifndef TABADV_ATTACKS_DOMAIN_HPP
#define TABADV_ATTACKS_DOMAIN_HPP

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tabadv/attacks/geometry.hpp"
#include "tabadv/constraints/repair.hpp"
#include "tabadv/model/access.hpp"

namespace tabadv {

/// The feasible region an attack works in: the true constraint set, the
/// scaling into [0,1]^d and the attacker's mutability mask.
class AttackDomain {
public:
    explicit AttackDomain(ConstraintSetPtr constraints, std::optional<std::vector<bool>> mask = std::nullopt)
        : constraints_(std::move(constraints)), scaler_(constraints_->schema()),
          mask_(mask ? std::move(*mask) : constraints_->schema().mutable_mask()) {
        if (mask_.size() != schema().size()) {
            throw ConfigError("mutability mask arity does not match the schema");
        }
    }

    const Schema& schema() const { return constraints_->schema(); }
    const ConstraintSet& constraints() const { return *constraints_; }
    const ConstraintSetPtr& constraints_ptr() const { return constraints_; }
    const Scaler& scaler() const { return scaler_; }
    const std::vector<bool>& mask() const { return mask_; }

private:
    ConstraintSetPtr constraints_;
    Scaler scaler_;
    std::vector<bool> mask_;
};

/// One clean input: original units (exact dataset row) and its scaled image.
struct Example {
    std::vector<double> original;
    std::vector<double> scaled;
    int label = 0;
    std::size_t index = 0; ///< position in the attacked batch; seeds per-example randomness
};

inline Example make_example(const AttackDomain& domain, std::span<const double> row, int label, std::size_t index) {
    if (row.size() != domain.schema().size()) {
        throw ConfigError("example arity does not match the schema");
    }
    return Example{{row.begin(), row.end()}, domain.scaler().scale(row), label, index};
}

inline std::vector<Example> make_examples(const AttackDomain& domain, const std::vector<std::vector<double>>& rows,
                                          const std::vector<int>& labels) {
    std::vector<Example> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.push_back(make_example(domain, rows[i], labels[i], i));
    }
    return out;
}

/// Scaled candidate back to original units. Coordinates left untouched
/// keep the exact original value instead of a rescaled copy.
inline std::vector<double> to_original(const AttackDomain& domain, const Example& ex, std::span<const double> s) {
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = s[i] == ex.scaled[i] ? ex.original[i] : domain.scaler().unscale(i, s[i]);
    }
    return out;
}

namespace detail {

/// Writes back into scaled space only the coordinates repair changed.
inline void apply_repair(const AttackDomain& domain, const Example& ex, std::vector<double>& s, bool relations) {
    const auto before = to_original(domain, ex, s);
    const auto after = repair(ex.original, before, domain.constraints(), RepairOptions{true, relations});
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (domain.mask()[i] && after[i] != before[i]) {
            s[i] = after[i] == ex.original[i] ? ex.scaled[i] : domain.scaler().scale(i, after[i]);
        }
    }
}

} // namespace detail

/// Projection followed by repair. When an assignment repair pushes the point
/// out of the box or the ball, it is projected again and re-rounded, so
/// every iterate stays feasible for the budget.
inline std::vector<double> project_and_repair(const AttackDomain& domain, const Example& ex,
                                              std::span<const double> z, double epsilon, bool relations) {
    auto s = project(ex.scaled, z, epsilon, domain.mask());
    detail::apply_repair(domain, ex, s, relations);
    if (!in_box(s) || !in_ball(ex.scaled, s, epsilon, 0.0)) {
        s = project(ex.scaled, s, epsilon, domain.mask());
        detail::apply_repair(domain, ex, s, false);
    }
    return s;
}

/// Objective maximised by the gradient attacks: loss minus g when the
/// attacker knows the relation constraints.
struct ObjectiveValue {
    double value = 0.0;
    double loss = 0.0;
    double penalty = 0.0;
    std::vector<double> grad; ///< in scaled space
};

inline ObjectiveValue attack_objective(const AttackDomain& domain, const ModelAccess& model, const Example& ex,
                                       std::span<const double> s, bool enforce) {
    auto lg = model.loss_gradient(s, ex.label);
    ObjectiveValue out{lg.loss, lg.loss, 0.0, std::move(lg.grad)};
    if (enforce && !domain.constraints().empty()) {
        const auto x = to_original(domain, ex, s);
        out.penalty = total_penalty(domain.constraints(), x, ex.original);
        out.value -= out.penalty;
        const auto pg = penalty_gradient(domain.constraints(), x, ex.original);
        for (std::size_t i = 0; i < out.grad.size(); ++i) {
            out.grad[i] -= pg[i] * domain.scaler().range(i);
        }
    }
    return out;
}

/// Verdict on a candidate against the defender's full domain.
struct Assessment {
    bool misclassified = false;
    bool valid = false;          ///< relations, bounds and types
    bool within_budget = false;  ///< box, ball and immutable coordinates
    bool success() const { return misclassified && valid && within_budget; }
};

inline int predicted_class(const Probabilities& p) { return p[1] > p[0] ? 1 : 0; }

inline bool within_budget(const AttackDomain& domain, const Example& ex, std::span<const double> s, double epsilon) {
    if (s.size() != ex.scaled.size() || !in_ball(ex.scaled, s, epsilon)) return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!std::isfinite(s[i])) return false;
        if (!domain.schema()[i].mutable_ && s[i] != ex.scaled[i]) return false;
    }
    return true;
}

inline bool domain_valid(const AttackDomain& domain, const Example& ex, std::span<const double> s) {
    return check(to_original(domain, ex, s), domain.constraints(), ex.original).valid;
}

/// Validity as the attacker can judge it: without relation knowledge only
/// bounds and types are checked.
inline bool attacker_valid(const AttackDomain& domain, const Example& ex, std::span<const double> s, bool relations) {
    const auto r = check(to_original(domain, ex, s), domain.constraints(), ex.original);
    if (relations) return r.valid;
    return r.out_of_bounds.empty() && r.type_violations.empty();
}

inline Assessment assess(const AttackDomain& domain, const Example& ex, std::span<const double> s, double epsilon,
                         const Probabilities& p) {
    Assessment a;
    a.misclassified = predicted_class(p) != ex.label;
    a.within_budget = within_budget(domain, ex, s, epsilon);
    a.valid = domain_valid(domain, ex, s);
    return a;
}

struct AttackOutcome {
    std::vector<double> candidate; ///< scaled
    bool success = false;
    bool misclassified = false;
    bool valid = false;
    bool within_budget = false;
    std::uint64_t gradient_calls = 0;
    std::uint64_t queries = 0;
    double wall_time = 0.0; ///< seconds
    std::string diagnostic; ///< set when the example was aborted
};

inline void record(AttackOutcome& out, const Assessment& a) {
    out.misclassified = a.misclassified;
    out.valid = a.valid;
    out.within_budget = a.within_budget;
    out.success = out.diagnostic.empty() && a.success();
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace tabadv

#endif
