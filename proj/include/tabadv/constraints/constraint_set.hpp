#ifndef TABADV_CONSTRAINTS_CONSTRAINT_SET_HPP
#define TABADV_CONSTRAINTS_CONSTRAINT_SET_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "tabadv/constraints/expr.hpp"

namespace tabadv {

struct NamedConstraint {
    std::string name;
    ConstraintPtr expr;
    bool has_division = false;
};

/// A relation of the form F[target] = rhs where rhs does not read F[target].
struct Assignment {
    std::size_t constraint; ///< index into the constraint list
    std::size_t target;     ///< feature index written by repair
    NumericPtr rhs;
};

inline constexpr double default_strict_margin = 1e-6;
inline constexpr double default_satisfaction_tol = 1e-9;

/// Linked, immutable set of relation constraints over one schema.
class ConstraintSet {
public:
    ConstraintSet(SchemaPtr schema, std::vector<NamedConstraint> constraints,
                  double strict_margin = default_strict_margin,
                  double satisfaction_tol = default_satisfaction_tol)
        : schema_(std::move(schema)), constraints_(std::move(constraints)),
          tau_(strict_margin), tol_(satisfaction_tol) {
        if (!schema_) {
            throw ConfigError("constraint set needs a schema");
        }
        if (!(tau_ > 0.0)) {
            throw ConfigError("strict margin must be positive");
        }
        if (!(tol_ >= 0.0)) {
            throw ConfigError("satisfaction tolerance must be non-negative");
        }
        std::unordered_set<std::string> names;
        for (auto& c : constraints_) {
            if (!c.expr) {
                throw ConfigError("constraint '" + c.name + "' is empty");
            }
            if (!names.insert(c.name).second) {
                throw ConfigError("duplicate constraint name '" + c.name + "'");
            }
            if (arity_needed(*c.expr) > schema_->size()) {
                throw ConfigError("constraint '" + c.name + "' references a feature outside the schema");
            }
            c.has_division = contains_division(*c.expr);
        }
        link_assignments();
    }

    /// An empty set over `schema`.
    explicit ConstraintSet(SchemaPtr schema) : ConstraintSet(std::move(schema), {}) {}

    const Schema& schema() const { return *schema_; }
    const SchemaPtr& schema_ptr() const { return schema_; }
    std::size_t size() const { return constraints_.size(); }
    bool empty() const { return constraints_.empty(); }
    const NamedConstraint& operator[](std::size_t i) const { return constraints_[i]; }
    const std::vector<NamedConstraint>& constraints() const { return constraints_; }
    double strict_margin() const { return tau_; }
    double satisfaction_tol() const { return tol_; }

    /// Assignment constraints in dependency order: every assignment comes
    /// after the assignments whose targets its right-hand side reads.
    const std::vector<Assignment>& assignments() const { return assignments_; }

    /// Copy with different margins (same constraints).
    ConstraintSet with_tolerances(double strict_margin, double satisfaction_tol) const {
        return ConstraintSet(schema_, constraints_, strict_margin, satisfaction_tol);
    }

private:
    void link_assignments() {
        std::vector<Assignment> found;
        std::vector<std::optional<std::size_t>> writer(schema_->size());
        for (std::size_t i = 0; i < constraints_.size(); ++i) {
            const auto* cmp = std::get_if<CompareNode>(&constraints_[i].expr->node);
            if (!cmp || cmp->rel != Relation::eq) {
                continue;
            }
            const auto* target = std::get_if<FeatureRef>(&cmp->lhs->node);
            if (!target) {
                continue;
            }
            bool self_reference = false;
            for_each_feature(*cmp->rhs, [&](std::size_t f) { self_reference = self_reference || f == target->index; });
            if (self_reference) {
                continue;
            }
            if (writer[target->index]) {
                throw ConfigError("features cannot be assigned twice: '" + constraints_[i].name + "' and '" +
                                  constraints_[found[*writer[target->index]].constraint].name + "' both define '" +
                                  schema_->operator[](target->index).name + "'");
            }
            writer[target->index] = found.size();
            found.push_back({i, target->index, cmp->rhs});
        }

        // Depth-first topological sort over "rhs reads target of" edges.
        enum class Mark { none, active, done };
        std::vector<Mark> mark(found.size(), Mark::none);
        assignments_.clear();
        auto visit = [&](auto&& self, std::size_t a) -> void {
            if (mark[a] == Mark::done) return;
            if (mark[a] == Mark::active) {
                throw ConfigError("circular assignment constraints involving '" +
                                  constraints_[found[a].constraint].name + "'");
            }
            mark[a] = Mark::active;
            std::set<std::size_t> deps;
            for_each_feature(*found[a].rhs, [&](std::size_t f) {
                if (writer[f]) deps.insert(*writer[f]);
            });
            for (std::size_t d : deps) self(self, d);
            mark[a] = Mark::done;
            assignments_.push_back(found[a]);
        };
        for (std::size_t a = 0; a < found.size(); ++a) {
            visit(visit, a);
        }
    }

    SchemaPtr schema_;
    std::vector<NamedConstraint> constraints_;
    double tau_;
    double tol_;
    std::vector<Assignment> assignments_;
};

using ConstraintSetPtr = std::shared_ptr<const ConstraintSet>;

} // namespace tabadv

#endif
