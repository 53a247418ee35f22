#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace tabadv;
using namespace tabadv::testing;

namespace {

SchemaPtr abc_schema() {
    static const auto s = std::make_shared<const Schema>(
        std::vector<FeatureSpec>{{"a", FeatureType::continuous, true, -100, 100, {}},
                                 {"b", FeatureType::continuous, true, -100, 100, {}},
                                 {"f", FeatureType::continuous, true, -100, 100, {}},
                                 {"n", FeatureType::discrete, true, 0, 10, {}},
                                 {"k", FeatureType::categorical, true, 1, 9, {1, 4, 9}}},
        "y");
    return s;
}

ConstraintSet one(const std::string& text) { return parse_constraints(text, abc_schema()); }

double pen(const std::string& text, std::vector<double> x) {
    const auto set = one(text);
    return total_penalty(set, x, x);
}

} // namespace

TEST(Parser, ComparisonOfTwoFeatures) {
    const auto set = parse_constraints("F[open_acc] <= F[total_acc]", demo_schema());
    ASSERT_EQ(set.size(), 1u);
    const auto expected = compare(Relation::le, feature(demo_schema()->index_of("open_acc")),
                                  feature(demo_schema()->index_of("total_acc")));
    EXPECT_TRUE(same(set.constraints()[0].expr, expected));
    EXPECT_EQ(set.constraints()[0].name, "c1");
}

TEST(Parser, EmptySourceGivesEmptySet) {
    EXPECT_EQ(one("").size(), 0u);
    EXPECT_EQ(one("# only a comment\n\n").size(), 0u);
}

TEST(Parser, TruncatedComparisonReportsEndOfInput) {
    try {
        one("F[a] <=");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("end of input"), std::string::npos) << e.what();
        EXPECT_EQ(e.line(), 1u);
    }
}

TEST(Parser, ErrorPositionOnLaterLine) {
    try {
        one("F[a] <= F[b]\nF[a] + * F[b] = 1");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), 8u);
    }
}

TEST(Parser, UnknownFeatureIsNamed) {
    try {
        one("F[nope] <= 1");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("nope"), std::string::npos);
    }
}

TEST(Parser, LexicalErrorIsReported) { EXPECT_THROW(one("F[a] <= 1 $"), ParseError); }

TEST(Parser, NamesCommentsAndUnicodeOperators) {
    const auto set = one("first: F[a] ≤ F[b] ∧ F[n] ∈ {1, 2}   # trailing\nsecond: F[a] ≠ 3 ∨ F[b] ≥ X0[b]");
    ASSERT_EQ(set.size(), 2u);
    EXPECT_EQ(set.constraints()[0].name, "first");
    EXPECT_EQ(set.constraints()[1].name, "second");
    const auto ascii = one("F[a] <= F[b] and F[n] in {1, 2}");
    const auto& same_ascii = ascii.constraints()[0].expr;
    EXPECT_TRUE(same(set.constraints()[0].expr, same_ascii));
}

TEST(Parser, PrecedenceAndGrouping) {
    const auto set = one("F[a] + F[b] * 2 <= (F[a] + F[b]) * 2 or (F[a] < 0 and F[b] > 0)");
    std::vector<double> x{1, 2, 0, 0, 1};
    // 1 + 4 <= 6 holds
    EXPECT_EQ(total_penalty(set, x, x), 0.0);
    EXPECT_EQ(to_string(*set.constraints()[0].expr, *abc_schema()),
              "((F[a] + (F[b] * 2)) <= ((F[a] + F[b]) * 2) or (F[a] < 0 and F[b] > 0))");
}

TEST(Parser, DivisionIsFlagged) {
    const auto set = one("F[f] = F[a] / F[b]\nF[a] <= F[b]");
    EXPECT_TRUE(set.constraints()[0].has_division);
    EXPECT_FALSE(set.constraints()[1].has_division);
}

TEST(Parser, DuplicateNamesRejected) { EXPECT_THROW(one("x: F[a] <= 1\nx: F[b] <= 1"), ConfigError); }

TEST(Parser, CircularAssignmentsRejected) {
    EXPECT_THROW(one("F[a] = F[b] + 1\nF[b] = F[a] * 2"), ConfigError);
    EXPECT_NO_THROW(one("F[a] = F[b] + 1\nF[f] = F[a] * 2"));
}

TEST(Parser, PrettyPrintRoundTripIsFixedPoint) {
    Rng rng(99);
    const auto schema = continuous_schema(6);
    for (int t = 0; t < 300; ++t) {
        std::vector<NamedConstraint> cs;
        for (int k = 0; k < 3; ++k) cs.push_back({"c" + std::to_string(k), random_constraint(rng, 6, 4, true)});
        // random trees may form assignment cycles; those sets are rejected by design
        std::optional<ConstraintSet> set;
        try {
            set.emplace(schema, cs);
        } catch (const ConfigError&) {
            continue;
        }
        const auto text = to_source(*set);
        const auto again = parse_constraints(text, schema);
        ASSERT_EQ(again.size(), set->size());
        for (std::size_t i = 0; i < set->size(); ++i) {
            ASSERT_TRUE(same(again.constraints()[i].expr, set->constraints()[i].expr)) << text;
        }
        EXPECT_EQ(to_source(again), text);
    }
}

TEST(Penalty, TableRows) {
    EXPECT_DOUBLE_EQ(pen("F[a] <= F[b]", {5, 3, 0, 0, 1}), 2.0);
    EXPECT_DOUBLE_EQ(pen("F[a] >= F[b]", {3, 5, 0, 0, 1}), 2.0);
    EXPECT_NEAR(pen("F[a] in {1, 2, 3}", {2.4, 0, 0, 0, 1}), 0.4, 1e-12);
    EXPECT_DOUBLE_EQ(pen("F[a] = F[b]", {1, 4, 0, 0, 1}), 3.0);
    EXPECT_DOUBLE_EQ(pen("F[a] < F[b]", {3, 3, 0, 0, 1}), 1e-6);
    EXPECT_DOUBLE_EQ(pen("F[a] > F[b]", {3, 3, 0, 0, 1}), 1e-6);
    EXPECT_DOUBLE_EQ(pen("F[a] < F[b]", {2, 3, 0, 0, 1}), 0.0);
    EXPECT_DOUBLE_EQ(pen("F[a] != F[b]", {3, 3, 0, 0, 1}), 1e-6);
    EXPECT_DOUBLE_EQ(pen("F[a] != F[b]", {3, 4, 0, 0, 1}), 0.0);
}

TEST(Penalty, OrTakesTheSatisfiedDisjunct) {
    EXPECT_DOUBLE_EQ(pen("F[a] <= 0 or F[b] <= 0", {3, 0, 0, 0, 1}), 0.0);
    EXPECT_DOUBLE_EQ(pen("F[a] <= 0 or F[b] <= 0", {3, 1, 0, 0, 1}), 1.0);
    EXPECT_DOUBLE_EQ(pen("F[a] <= 0 and F[b] <= 0", {3, 1, 0, 0, 1}), 4.0);
}

TEST(Penalty, OriginalValuesReadX0) {
    const auto set = one("F[a] >= X0[a] * 0.5");
    const std::vector<double> x0{10, 0, 0, 0, 1};
    EXPECT_DOUBLE_EQ(total_penalty(set, std::vector<double>{4, 0, 0, 0, 1}, x0), 1.0);
    EXPECT_DOUBLE_EQ(total_penalty(set, std::vector<double>{6, 0, 0, 0, 1}, x0), 0.0);
}

TEST(Penalty, DivisionByZeroNamesTheConstraint) {
    const auto set = one("ratio: F[f] = F[a] / F[b]");
    std::vector<double> x{1, 0, 0, 0, 1};
    try {
        total_penalty(set, x, x);
        FAIL();
    } catch (const EvaluationError& e) {
        EXPECT_NE(std::string(e.what()).find("ratio"), std::string::npos);
    }
}

TEST(Penalty, ReportTotalsMatch) {
    const auto set = one("F[a] <= 0\nF[b] <= 0\nF[a] = F[b]");
    std::vector<double> x{2, 5, 0, 0, 1};
    const auto r = penalty_report(set, x, x);
    ASSERT_EQ(r.per_constraint.size(), 3u);
    EXPECT_DOUBLE_EQ(r.total, 2.0 + 5.0 + 3.0);
    EXPECT_EQ(r.per_constraint[2].first, "c3");
}

TEST(Penalty, ZeroExactlyWhenInterpreterSaysTrue) {
    Rng rng(5);
    std::size_t satisfied = 0;
    for (int t = 0; t < 200; ++t) {
        const auto c = random_constraint(rng, 6, 4);
        for (int p = 0; p < 50; ++p) {
            const auto x = grid_point(rng, 6);
            const auto x0 = grid_point(rng, 6);
            const bool zero = penalty(*c, x, x0, 1e-6) == 0.0;
            ASSERT_EQ(zero, holds(*c, x, x0, 1e-6));
            satisfied += zero ? 1 : 0;
        }
    }
    // the grid makes both outcomes common
    EXPECT_GT(satisfied, 1000u);
    EXPECT_LT(satisfied, 9000u);
}

TEST(Penalty, CompositionRulesOnRandomTrees) {
    Rng rng(17);
    for (int t = 0; t < 300; ++t) {
        const auto l = random_constraint(rng, 5, 3);
        const auto r = random_constraint(rng, 5, 3);
        std::vector<double> x(5), x0(5);
        for (auto& v : x) v = rng.uniform(-3, 3);
        for (auto& v : x0) v = rng.uniform(-3, 3);
        const double pl = penalty(*l, x, x0, 1e-6);
        const double pr = penalty(*r, x, x0, 1e-6);
        EXPECT_GE(pl, 0.0);
        EXPECT_EQ(penalty(*conj(l, r), x, x0, 1e-6), pl + pr);
        EXPECT_EQ(penalty(*disj(l, r), x, x0, 1e-6), std::min(pl, pr));
    }
}

TEST(PenaltyGradient, ActiveHinge) {
    const auto set = one("F[a] <= F[b]");
    std::vector<double> x{5, 3, 0, 0, 1};
    EXPECT_EQ(penalty_gradient(set, x, x), (std::vector<double>{1, -1, 0, 0, 0}));
}

TEST(PenaltyGradient, StrictlySatisfiedIsZero) {
    const auto set = one("F[a] <= F[b]");
    std::vector<double> x{1, 3, 0, 0, 1};
    EXPECT_EQ(penalty_gradient(set, x, x), std::vector<double>(5, 0.0));
}

TEST(PenaltyGradient, KinksTakeTheZeroBranch) {
    std::vector<double> x{3, 3, 0, 0, 1};
    EXPECT_EQ(penalty_gradient(one("F[a] <= F[b]"), x, x), std::vector<double>(5, 0.0));
    EXPECT_EQ(penalty_gradient(one("F[a] = F[b]"), x, x), std::vector<double>(5, 0.0));
    // tie between disjuncts: the first one wins
    std::vector<double> y{1, 1, 0, 0, 1};
    EXPECT_EQ(penalty_gradient(one("F[a] <= 0 or F[b] <= 0"), y, y), (std::vector<double>{1, 0, 0, 0, 0}));
}

TEST(PenaltyGradient, MatchesCentralDifferences) {
    Rng rng(23);
    const auto schema = continuous_schema(5);
    int probes = 0;
    while (probes < 100) {
        std::vector<NamedConstraint> cs;
        for (int k = 0; k < 3; ++k) cs.push_back({"c" + std::to_string(k), random_constraint(rng, 5, 4, true)});
        std::optional<ConstraintSet> set;
        try {
            set.emplace(schema, cs);
        } catch (const ConfigError&) {
            continue;
        }
        std::vector<double> x(5), x0(5);
        for (auto& v : x) v = rng.uniform(-3, 3);
        for (auto& v : x0) v = rng.uniform(-3, 3);
        double kd = std::numeric_limits<double>::infinity();
        for (const auto& c : set->constraints()) kd = std::min(kd, kink_distance(*c.expr, x, x0, 1e-6));
        if (kd < 1e-3) continue;
        ++probes;
        const auto g = penalty_gradient(*set, x, x0);
        for (std::size_t i = 0; i < 5; ++i) {
            const double h = 1e-5;
            auto xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (total_penalty(*set, xp, x0) - total_penalty(*set, xm, x0)) / (2 * h);
            const double rel = std::abs(fd - g[i]) / std::max({1.0, std::abs(fd), std::abs(g[i])});
            ASSERT_LE(rel, 1e-4) << "feature " << i << " fd " << fd << " analytic " << g[i] << "\n" << to_source(*set);
        }
    }
}

TEST(Check, ValidRowPasses) {
    const auto& train = *demo_train();
    const auto r = check(train.rows[0], *demo_constraints());
    EXPECT_TRUE(r.valid);
    EXPECT_TRUE(r.failures.empty());
}

TEST(Check, NonIntegralDiscreteIsNamed) {
    auto x = demo_train()->rows[0];
    x[demo_schema()->index_of("open_acc")] += 0.5;
    const auto r = check(x, *demo_constraints());
    EXPECT_FALSE(r.valid);
    ASSERT_EQ(r.type_violations.size(), 1u);
    EXPECT_EQ(r.type_violations[0], demo_schema()->index_of("open_acc"));
    bool named = false;
    for (const auto& f : r.failures) named = named || f.find("open_acc") != std::string::npos;
    EXPECT_TRUE(named);
}

TEST(Check, BoundsAndLevels) {
    const auto set = one("");
    EXPECT_FALSE(check(std::vector<double>{101, 0, 0, 0, 1}, set).valid);
    EXPECT_FALSE(check(std::vector<double>{0, 0, 0, 0, 2}, set).valid);
    EXPECT_TRUE(check(std::vector<double>{0, 0, 0, 10, 9}, set).valid);
    const auto r = check(std::vector<double>{0, 0, 0, 0, 2}, set);
    EXPECT_EQ(r.type_violations, (std::vector<std::size_t>{4}));
}

TEST(Check, RelationWithinTolerance) {
    const auto set = one("F[a] = F[b]");
    EXPECT_TRUE(check(std::vector<double>{1, 1 + 5e-10, 0, 0, 1}, set).valid);
    EXPECT_FALSE(check(std::vector<double>{1, 1 + 5e-9, 0, 0, 1}, set).valid);
}

TEST(Repair, DiscreteRoundsTowardOriginal) {
    const auto set = one("");
    const std::vector<double> x0{0, 0, 0, 3, 1};
    EXPECT_EQ(repair(x0, std::vector<double>{0, 0, 0, 3.7, 1}, set)[3], 3.0);
    EXPECT_EQ(repair(x0, std::vector<double>{0, 0, 0, 5.7, 1}, set)[3], 5.0);
    EXPECT_EQ(repair(x0, std::vector<double>{0, 0, 0, 1.2, 1}, set)[3], 2.0);
}

TEST(Repair, CategoricalMovesAlongLevels) {
    const auto set = one("");
    const std::vector<double> x0{0, 0, 0, 0, 4};
    EXPECT_EQ(repair(x0, std::vector<double>{0, 0, 0, 0, 8}, set)[4], 4.0);
    EXPECT_EQ(repair(x0, std::vector<double>{0, 0, 0, 0, 9}, set)[4], 9.0);
    EXPECT_EQ(repair(x0, std::vector<double>{0, 0, 0, 0, 2}, set)[4], 4.0);
    EXPECT_EQ(repair(x0, std::vector<double>{0, 0, 0, 0, 1}, set)[4], 1.0);
}

TEST(Repair, AssignmentConstraintSetsTarget) {
    const auto set = one("F[f] = F[a] + F[b]");
    const std::vector<double> x{1, 2, 7, 0, 1};
    const auto r = repair(x, x, set);
    EXPECT_EQ(r[2], 3.0);
    EXPECT_EQ(r[0], 1.0);
    EXPECT_EQ(r[1], 2.0);
}

TEST(Repair, AssignmentsFollowDependencyOrder) {
    // f depends on a, which is itself assigned from b
    const auto set = one("F[f] = F[a] * 2\nF[a] = F[b] + 1");
    const std::vector<double> x{0, 4, 0, 0, 1};
    const auto r = repair(x, x, set);
    EXPECT_EQ(r[0], 5.0);
    EXPECT_EQ(r[2], 10.0);
    EXPECT_EQ(total_penalty(set, r, x), 0.0);
}

TEST(Repair, ValidInputUnchanged) {
    for (const auto& row : demo_train()->rows) {
        EXPECT_EQ(repair(row, row, *demo_constraints()), row);
    }
}

TEST(Repair, IdempotentAndEnforcesAssignments) {
    const auto& set = *demo_constraints();
    const auto& schema = *demo_schema();
    Rng rng(3);
    for (const auto& x0 : demo_train()->rows) {
        std::vector<double> x = x0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!schema[i].mutable_) continue;
            const double span = schema[i].upper - schema[i].lower;
            x[i] = std::clamp(x[i] + rng.normal(0, 0.1 * span), schema[i].lower, schema[i].upper);
        }
        const auto once = repair(x0, x, set);
        EXPECT_EQ(repair(x0, once, set), once);
        for (const auto& a : set.assignments()) {
            EXPECT_EQ(penalty(set.constraints()[a.constraint], once, x0, set.strict_margin()), 0.0);
        }
        for (std::size_t i = 0; i < schema.size(); ++i) {
            if (schema[i].type == FeatureType::discrete) {
                EXPECT_EQ(once[i], std::round(once[i]));
                EXPECT_GE(once[i], schema[i].lower);
                EXPECT_LE(once[i], schema[i].upper);
            }
        }
    }
}

TEST(Repair, ImmutableTargetsAreLeftAlone) {
    const auto schema = std::make_shared<const Schema>(
        std::vector<FeatureSpec>{{"a", FeatureType::continuous, true, 0, 10, {}},
                                 {"b", FeatureType::continuous, false, 0, 10, {}}},
        "y");
    const auto set = parse_constraints("F[b] = F[a]", schema);
    const std::vector<double> x0{1, 1};
    EXPECT_EQ(repair(x0, std::vector<double>{2, 1}, set), (std::vector<double>{2, 1}));
}

TEST(ConstraintSetTest, RejectsBadTolerances) {
    EXPECT_THROW(parse_constraints("", abc_schema(), 0.0), ConfigError);
    EXPECT_THROW(parse_constraints("", abc_schema(), 1e-6, -1.0), ConfigError);
}
