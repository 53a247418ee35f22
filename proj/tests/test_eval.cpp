#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace tabadv;
using namespace tabadv::testing;

namespace {

ScenarioConfig quick_config(std::size_t threads = 1) {
    ScenarioConfig cfg;
    cfg.attacks.moeva.n_generations = 10;
    cfg.attacks.moeva.population_size = 20;
    cfg.attacks.moeva.n_offspring = 20;
    cfg.surrogate.train = demo_train_config();
    cfg.surrogate.train.epochs = 30;
    cfg.threads = threads;
    return cfg;
}

ScenarioRun run(const std::string& id, const ScenarioConfig& cfg, std::uint64_t seed = 1) {
    return run_scenario(scenario(id), demo_standard_model(), demo_train(), demo_eval(), cfg, seed);
}

} // namespace

TEST(Cascade, LaterStagesRunOnlyOnFailures) {
    const auto r = run("A1", quick_config());
    ASSERT_EQ(r.cascade.entries.size(), demo_eval()->count(1));
    for (const auto& e : r.cascade.entries) {
        switch (e.stage) {
        case Stage::natural: EXPECT_TRUE(e.attempted.empty()); break;
        case Stage::cpgd: EXPECT_EQ(e.attempted, std::vector<Stage>{Stage::cpgd}); break;
        case Stage::capgd: EXPECT_EQ(e.attempted, (std::vector<Stage>{Stage::cpgd, Stage::capgd})); break;
        default: EXPECT_EQ(e.attempted.size(), 3u); break;
        }
        for (std::size_t k = 0; k + 1 < e.outcomes.size(); ++k) EXPECT_FALSE(e.outcomes[k].success);
    }
    EXPECT_TRUE(r.audit_failures.empty());
    std::size_t total = 0;
    for (auto c : r.stage_counts) total += c;
    EXPECT_EQ(total, r.n_examples);
}

TEST(Cascade, AlreadyMisclassifiedInputsAreNotAttacked) {
    auto model = std::make_shared<const MlpModel>(linear_model(std::vector<double>(8, 0.0), -5.0));
    const AttackDomain domain(demo_constraints());
    const auto pos = demo_eval()->with_label(1);
    const auto examples = make_examples(domain, pos.rows, pos.labels);
    const ModelAccess access(model, AccessLevel::whitebox);
    const auto res = caa(domain, access, examples, CaaConfig{});
    EXPECT_EQ(res.count(Stage::natural), examples.size());
    EXPECT_EQ(access.gradient_calls(), 0u);
    EXPECT_EQ(access.queries(), examples.size());
    EXPECT_EQ(robust_accuracy(*model, domain, examples, res.adversarial(), 0.5), 0.0);
}

TEST(Cascade, StagesMustShareBudget) {
    CaaConfig cfg;
    cfg.moeva.epsilon = 0.3;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.set_epsilon(0.3);
    EXPECT_NO_THROW(cfg.validate());
    cfg.capgd.enforce_constraints = false;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Cascade, GradientStagesSkippedUnderQueryAccess) {
    EXPECT_EQ(runnable_stages(stages_of(AttackKind::caa), AccessLevel::query_proba), std::vector<Stage>{Stage::moeva});
    EXPECT_THROW(runnable_stages({Stage::cpgd}, AccessLevel::query_proba), AccessError);
    EXPECT_THROW(runnable_stages({Stage::moeva}, AccessLevel::none), AccessError);
}

TEST(RobustAccuracy, MatchesHandOracle) {
    // predicts class 1 iff f0 > 0.5
    const auto model = linear_model({10.0, 0.0}, -5.0);
    const AttackDomain domain(std::make_shared<const ConstraintSet>(continuous_schema(2, 0.0, 1.0)));
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Example> examples;
        std::vector<std::vector<double>> adv;
        std::size_t expected = 0;
        for (std::size_t i = 0; i < 20; ++i) {
            const double f0 = rng.bernoulli(0.8) ? 0.7 : 0.3;
            examples.push_back(make_example(domain, std::vector<double>{f0, 0.5}, 1, i));
            std::vector<double> c{f0, 0.5};
            switch (rng.index(4)) {
            case 0: break;
            case 1: c[0] = f0 - 0.25; break; // flips 0.7, stays in budget
            case 2: c[0] = 0.0; c[1] = 0.0; break; // too far
            default: c[1] = 1.2; break;            // outside the box
            }
            adv.push_back(c);
            const bool clean_ok = f0 > 0.5;
            const double dist = std::hypot(c[0] - f0, c[1] - 0.5);
            const bool usable = dist <= 0.5 + 1e-6 && c[1] <= 1.0;
            const double seen = usable ? c[0] : f0;
            expected += clean_ok && seen > 0.5 ? 1 : 0;
        }
        EXPECT_DOUBLE_EQ(robust_accuracy(model, domain, examples, adv, 0.5), static_cast<double>(expected) / 20.0);
    }
}

TEST(RobustAccuracy, InvalidCandidatesRevert) {
    const AttackDomain domain(demo_constraints());
    const auto pos = demo_eval()->with_label(1);
    const auto examples = make_examples(domain, pos.rows, pos.labels);
    auto adv = std::vector<std::vector<double>>{};
    const auto ratio = domain.schema().index_of("debt_ratio");
    for (const auto& ex : examples) {
        auto c = ex.scaled;
        c[ratio] = c[ratio] > 0.5 ? c[ratio] - 0.3 : c[ratio] + 0.3; // breaks the equality
        adv.push_back(c);
    }
    const auto& m = *demo_standard_model();
    EXPECT_EQ(robust_accuracy(m, domain, examples, adv, 0.5), clean_accuracy(m, examples));
}

TEST(RobustAccuracy, AllFlippedGivesZero) {
    const auto model = linear_model({10.0, 0.0}, -5.0);
    const AttackDomain domain(std::make_shared<const ConstraintSet>(continuous_schema(2, 0.0, 1.0)));
    std::vector<Example> examples;
    std::vector<std::vector<double>> adv;
    for (std::size_t i = 0; i < 10; ++i) {
        examples.push_back(make_example(domain, std::vector<double>{0.6, 0.1 * static_cast<double>(i)}, 1, i));
        adv.push_back({0.4, 0.1 * static_cast<double>(i)});
    }
    EXPECT_EQ(robust_accuracy(model, domain, examples, adv, 0.5), 0.0);
    EXPECT_EQ(clean_accuracy(model, examples), 1.0);
}

TEST(Satisfaction, TableRates) {
    const auto schema = continuous_schema(2, 0.0, 10.0);
    const auto set = parse_constraints("le: F[f0] <= F[f1]\neq: F[f0] + F[f1] = 4\n", schema);
    const std::vector<std::vector<double>> cands{{1, 3}, {3, 1}, {2, 2}, {1, 11}};
    const auto t = constraint_satisfaction_table(cands, cands, set);
    ASSERT_EQ(t.relations.size(), 2u);
    EXPECT_EQ(t.relations[0].name, "le");
    EXPECT_DOUBLE_EQ(t.relations[0].rate, 0.75);
    EXPECT_DOUBLE_EQ(t.relations[1].rate, 0.75);
    EXPECT_DOUBLE_EQ(t.all_relations, 0.5);
    EXPECT_DOUBLE_EQ(t.bounds, 0.75);
    EXPECT_DOUBLE_EQ(t.types, 1.0);
    EXPECT_THROW(constraint_satisfaction_table({}, {}, set), ConfigError);
}

TEST(Scenario, TableFlags) {
    const auto& t = scenario_table();
    ASSERT_EQ(t.size(), 10u);
    const char* ids[] = {"A1", "A2", "B1", "B2", "C1", "C2", "D1", "D2", "E1", "E2"};
    const AccessLevel access[] = {AccessLevel::whitebox, AccessLevel::query_proba, AccessLevel::none,
                                  AccessLevel::none, AccessLevel::none};
    const DataAccess data[] = {DataAccess::full, DataAccess::full, DataAccess::full, DataAccess::subset,
                               DataAccess::distribution};
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(t[i].id, ids[i]);
        EXPECT_EQ(t[i].domain_knowledge, i % 2 == 0);
        EXPECT_EQ(t[i].model_access, access[i / 2]);
        EXPECT_EQ(t[i].dataset_access, data[i / 2]);
    }
    EXPECT_THROW(scenario("F1"), ConfigError);
}

TEST(Scenario, SubsetSurrogateSeesTenPercent) {
    const auto r = run("D1", quick_config());
    EXPECT_EQ(r.attacker_rows, 50u);
    EXPECT_EQ(r.queries > 0, true);
    EXPECT_TRUE(r.audit_failures.empty());
    EXPECT_EQ(run("C1", quick_config()).attacker_rows, 500u);
}

TEST(Scenario, TransferWithTheTargetAsSurrogateEqualsWhitebox) {
    auto cfg = quick_config();
    cfg.surrogate.model = demo_standard_model();
    const auto a = run("A1", cfg);
    const auto c = run("C1", cfg);
    EXPECT_EQ(c.robust_accuracy, a.robust_accuracy);
    EXPECT_EQ(c.cascade.adversarial(), a.cascade.adversarial());
    EXPECT_EQ(c.stage_counts, a.stage_counts);
}

TEST(Scenario, QueryOnlyRejectsGradientAttacks) {
    auto cfg = quick_config();
    cfg.attack = AttackKind::cpgd;
    EXPECT_THROW(run("B1", cfg), AccessError);
    cfg.attack = AttackKind::caa;
    const auto r = run("B1", cfg);
    EXPECT_EQ(r.gradient_calls, 0u);
    EXPECT_EQ(r.stage_counts[stage_index(Stage::cpgd)] + r.stage_counts[stage_index(Stage::capgd)], 0u);
}

TEST(Scenario, WithoutDomainKnowledgeAttacksAreWeaker) {
    const auto a1 = run("A1", quick_config());
    const auto a2 = run("A2", quick_config());
    EXPECT_GE(a2.robust_accuracy, a1.robust_accuracy);
    ASSERT_TRUE(a1.satisfaction && a2.satisfaction);
    EXPECT_EQ(a1.satisfaction->all_relations, 1.0);
    EXPECT_LT(a2.satisfaction->all_relations, 1.0);
    EXPECT_EQ(a2.satisfaction->bounds, 1.0);
    EXPECT_EQ(a2.satisfaction->types, 1.0);
}

TEST(Scenario, SeedAggregate) {
    std::vector<ScenarioRun> runs(3);
    runs[0].robust_accuracy = 0.2;
    runs[1].robust_accuracy = 0.4;
    runs[2].robust_accuracy = 0.6;
    const auto agg = aggregate(runs);
    EXPECT_NEAR(agg.robust_accuracy.mean, 0.4, 1e-15);
    EXPECT_NEAR(agg.robust_accuracy.stddev, 0.2, 1e-15);
    EXPECT_EQ(agg.robust_accuracy.n, 3u);
}

TEST(Report, DeterministicAndThreadIndependent) {
    auto make = [](std::size_t threads) {
        std::vector<ReportCell> cells{{"standard", {run("A1", quick_config(threads)), run("B2", quick_config(threads))}}};
        return report_json(nlohmann::json::object(), cells).dump(2) + report_csv(cells) + outcomes_csv(cells);
    };
    const auto one = make(1);
    EXPECT_EQ(one, make(1));
    EXPECT_EQ(one, make(4));
}

TEST(Audit, FlagsEachKindOfViolation) {
    const AttackDomain domain(demo_constraints());
    const auto ex = make_example(domain, demo_eval()->with_label(1).rows[0], 1, 0);
    EXPECT_TRUE(audit_candidate(domain, ex, ex.scaled, 0.5).empty());
    auto far = ex.scaled;
    far[0] = far[0] > 0.5 ? 0.0 : 1.0;
    far[1] = far[1] > 0.5 ? 0.0 : 1.0;
    EXPECT_FALSE(audit_candidate(domain, ex, far, 0.5).empty());
    auto immut = ex.scaled;
    immut[domain.schema().index_of("history_len")] += 0.01;
    EXPECT_FALSE(audit_candidate(domain, ex, immut, 0.5).empty());
    auto frac = ex.scaled;
    frac[domain.schema().index_of("open_acc")] += 0.01;
    EXPECT_FALSE(audit_candidate(domain, ex, frac, 0.5).empty());
}
