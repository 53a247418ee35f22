#ifndef TABADV_EVAL_SCENARIO_HPP
#define TABADV_EVAL_SCENARIO_HPP

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tabadv/core/stats.hpp"
#include "tabadv/data/sampling.hpp"
#include "tabadv/eval/audit.hpp"
#include "tabadv/eval/caa.hpp"
#include "tabadv/eval/metrics.hpp"
#include "tabadv/model/train.hpp"

namespace tabadv {

/// One row of the threat-model table. Variant 1 knows the relation
/// constraints, variant 2 only bounds, types and mutability.
struct ScenarioSpec {
    std::string id;
    bool domain_knowledge = true;
    AccessLevel model_access = AccessLevel::whitebox;
    DataAccess dataset_access = DataAccess::full;

    bool transfer() const { return model_access == AccessLevel::none; }
};

inline const std::array<ScenarioSpec, 10>& scenario_table() {
    static const std::array<ScenarioSpec, 10> table{{
        {"A1", true, AccessLevel::whitebox, DataAccess::full},
        {"A2", false, AccessLevel::whitebox, DataAccess::full},
        {"B1", true, AccessLevel::query_proba, DataAccess::full},
        {"B2", false, AccessLevel::query_proba, DataAccess::full},
        {"C1", true, AccessLevel::none, DataAccess::full},
        {"C2", false, AccessLevel::none, DataAccess::full},
        {"D1", true, AccessLevel::none, DataAccess::subset},
        {"D2", false, AccessLevel::none, DataAccess::subset},
        {"E1", true, AccessLevel::none, DataAccess::distribution},
        {"E2", false, AccessLevel::none, DataAccess::distribution},
    }};
    return table;
}

inline const ScenarioSpec& scenario(const std::string& id) {
    for (const auto& s : scenario_table()) {
        if (s.id == id) return s;
    }
    throw ConfigError("unknown scenario '" + id + "' (expected A1..E2)");
}

/// How the attacker builds a surrogate in the transfer scenarios.
struct SurrogateConfig {
    std::vector<std::size_t> hidden{16}; ///< differs from the default target on purpose
    TrainConfig train;
    double subset_fraction = default_subset_fraction;
    std::shared_ptr<const MlpModel> model; ///< use these weights instead of training
};

struct ScenarioConfig {
    CaaConfig attacks;
    AttackKind attack = AttackKind::caa;
    SurrogateConfig surrogate;
    std::size_t threads = 1;
};

/// Result of one scenario for one seed.
struct ScenarioRun {
    std::string scenario;
    AttackKind attack = AttackKind::caa;
    std::uint64_t seed = 0;
    std::size_t n_examples = 0;
    double clean_accuracy = 0.0;
    double robust_accuracy = 0.0;
    std::array<std::size_t, 5> stage_counts{}; ///< indexed by Stage
    std::optional<SatisfactionTable> satisfaction; ///< over attacked examples' emitted candidates
    std::uint64_t queries = 0;
    std::uint64_t gradient_calls = 0;
    std::size_t attacker_rows = 0; ///< rows the attacker trained a surrogate on (transfer only)
    std::vector<std::string> audit_failures; ///< success-flagged outcomes the auditor rejects
    std::vector<Example> examples;
    CascadeResult cascade;
};

inline std::size_t stage_index(Stage s) { return static_cast<std::size_t>(s); }

/// Surrogate trained by the attacker on the data it can reach.
inline std::shared_ptr<const MlpModel> build_surrogate(const ScenarioSpec& spec, const DatasetPtr& train_data,
                                                       const SurrogateConfig& cfg, std::uint64_t seed,
                                                       std::size_t* rows_used = nullptr) {
    if (cfg.model) {
        if (rows_used) *rows_used = 0;
        return cfg.model;
    }
    const auto data = sample_access(train_data, spec.dataset_access, derive_seed(seed, 0, "access"), cfg.subset_fraction);
    if (rows_used) *rows_used = data->size();
    std::vector<std::size_t> sizes{data->schema->size()};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(2);
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(seed, 0, "surrogate-train");
    const auto init = MlpModel::he_uniform(sizes, derive_seed(seed, 0, "surrogate"));
    return std::make_shared<const MlpModel>(train(init, *data, tc).model);
}

/// Runs one scenario against `target`, attacking the positive-class rows of
/// `eval_data`. Candidates are always judged against the true constraints.
inline ScenarioRun run_scenario(const ScenarioSpec& spec, const std::shared_ptr<const MlpModel>& target,
                                const DatasetPtr& train_data, const DatasetPtr& eval_data, const ScenarioConfig& cfg,
                                std::uint64_t seed) {
    if (!eval_data->constraints) throw ConfigError("evaluation data has no constraint set attached");
    CaaConfig attacks = cfg.attacks;
    attacks.set_enforce(spec.domain_knowledge);
    attacks.moeva.seed = seed;
    attacks.validate();

    const AttackDomain domain(eval_data->constraints);
    const Dataset positives = eval_data->with_label(1);
    ScenarioRun run;
    run.scenario = spec.id;
    run.attack = cfg.attack;
    run.seed = seed;
    run.examples = make_examples(domain, positives.rows, positives.labels);
    run.n_examples = run.examples.size();

    std::shared_ptr<const MlpModel> attacked = target;
    AccessLevel level = spec.model_access;
    if (spec.transfer()) {
        attacked = build_surrogate(spec, train_data, cfg.surrogate, seed, &run.attacker_rows);
        level = AccessLevel::whitebox;
    }
    const ModelAccess access(attacked, level);
    const auto stages = runnable_stages(stages_of(cfg.attack), level);
    run.cascade = caa(domain, access, run.examples, attacks, stages, cfg.threads);
    run.queries = access.queries();
    run.gradient_calls = access.gradient_calls();

    const auto adversarial = run.cascade.adversarial();
    run.clean_accuracy = clean_accuracy(*target, run.examples);
    run.robust_accuracy = robust_accuracy(*target, domain, run.examples, adversarial, attacks.epsilon());
    for (const auto& e : run.cascade.entries) ++run.stage_counts[stage_index(e.stage)];

    std::vector<Example> attacked_examples;
    std::vector<std::vector<double>> emitted;
    for (std::size_t i = 0; i < run.examples.size(); ++i) {
        const auto& e = run.cascade.entries[i];
        if (e.attempted.empty()) continue;
        attacked_examples.push_back(run.examples[i]);
        emitted.push_back(e.adversarial);
        for (const auto& out : e.outcomes) {
            if (!out.success) continue;
            for (const auto& p : audit_candidate(domain, run.examples[i], out.candidate, attacks.epsilon())) {
                run.audit_failures.push_back("example " + std::to_string(i) + ": " + p);
            }
        }
    }
    if (!emitted.empty()) run.satisfaction = constraint_satisfaction_table(domain, attacked_examples, emitted);
    return run;
}

/// Mean and 95% interval of a metric over seeds.
struct SeedAggregate {
    Summary clean_accuracy;
    Summary robust_accuracy;
};

inline SeedAggregate aggregate(const std::vector<ScenarioRun>& runs) {
    std::vector<double> clean, robust;
    for (const auto& r : runs) {
        clean.push_back(r.clean_accuracy);
        robust.push_back(r.robust_accuracy);
    }
    return {summarize(clean), summarize(robust)};
}

} // namespace tabadv

#endif
