#ifndef TABADV_EVAL_METRICS_HPP
#define TABADV_EVAL_METRICS_HPP

#include <string>
#include <vector>

#include "tabadv/attacks/domain.hpp"

namespace tabadv {

inline double clean_accuracy(const MlpModel& model, const std::vector<Example>& examples) {
    if (examples.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& ex : examples) correct += model.predict(ex.scaled) == ex.label ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(examples.size());
}

/// Point the defender actually sees: the candidate if it is valid and
/// within budget, otherwise the clean input.
inline const std::vector<double>& evaluated_point(const AttackDomain& domain, const Example& ex,
                                                  const std::vector<double>& candidate, double epsilon) {
    if (candidate.size() == ex.scaled.size() && within_budget(domain, ex, candidate, epsilon) &&
        domain_valid(domain, ex, candidate)) {
        return candidate;
    }
    return ex.scaled;
}

/// Fraction of examples still classified correctly after substituting
/// adversarial candidates; invalid candidates revert, and examples the
/// model already gets wrong count as incorrect.
inline double robust_accuracy(const MlpModel& model, const AttackDomain& domain, const std::vector<Example>& examples,
                              const std::vector<std::vector<double>>& adversarial, double epsilon) {
    if (adversarial.size() != examples.size()) {
        throw ConfigError("adversarial batch has " + std::to_string(adversarial.size()) + " rows for " +
                          std::to_string(examples.size()) + " examples");
    }
    if (examples.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& ex = examples[i];
        if (adversarial[i].size() != ex.scaled.size()) {
            throw ConfigError("adversarial row " + std::to_string(i) + " has the wrong arity");
        }
        if (model.predict(ex.scaled) != ex.label) continue;
        correct += model.predict(evaluated_point(domain, ex, adversarial[i], epsilon)) == ex.label ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(examples.size());
}

struct SatisfactionRow {
    std::string name;
    double rate = 0.0;
};

/// Per relation constraint: share of candidates with penalty <= tol. Two
/// extra rows give the share within bounds and the share with valid types;
/// a last row gives the share satisfying every relation at once.
struct SatisfactionTable {
    std::vector<SatisfactionRow> relations;
    double bounds = 0.0;
    double types = 0.0;
    double all_relations = 0.0;
    std::size_t n = 0;
};

/// `candidates` and `originals` are in original units.
inline SatisfactionTable constraint_satisfaction_table(const std::vector<std::vector<double>>& candidates,
                                                       const std::vector<std::vector<double>>& originals,
                                                       const ConstraintSet& set) {
    if (candidates.empty()) throw ConfigError("satisfaction table needs at least one candidate");
    if (candidates.size() != originals.size()) throw ConfigError("candidates and originals differ in length");
    SatisfactionTable t;
    t.n = candidates.size();
    std::vector<std::size_t> ok(set.size(), 0);
    std::size_t bounds = 0, types = 0, all = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto r = check(candidates[i], set, originals[i]);
        bool every = true;
        for (std::size_t c = 0; c < set.size(); ++c) {
            ok[c] += r.relation_ok[c] ? 1 : 0;
            every = every && r.relation_ok[c];
        }
        all += every ? 1 : 0;
        bounds += r.out_of_bounds.empty() ? 1 : 0;
        types += r.type_violations.empty() ? 1 : 0;
    }
    const auto n = static_cast<double>(t.n);
    for (std::size_t c = 0; c < set.size(); ++c) {
        t.relations.push_back({set.constraints()[c].name, static_cast<double>(ok[c]) / n});
    }
    t.bounds = static_cast<double>(bounds) / n;
    t.types = static_cast<double>(types) / n;
    t.all_relations = static_cast<double>(all) / n;
    return t;
}

/// Convenience overload for scaled candidates of a batch of examples.
inline SatisfactionTable constraint_satisfaction_table(const AttackDomain& domain, const std::vector<Example>& examples,
                                                       const std::vector<std::vector<double>>& scaled) {
    std::vector<std::vector<double>> cand, orig;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        cand.push_back(to_original(domain, examples[i], scaled[i]));
        orig.push_back(examples[i].original);
    }
    return constraint_satisfaction_table(cand, orig, domain.constraints());
}

} // namespace tabadv

#endif
