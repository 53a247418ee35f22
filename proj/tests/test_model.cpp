#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace tabadv;
using namespace tabadv::testing;

namespace {

// Plain re-implementation of the forward pass used as an oracle.
std::array<double, 2> reference_forward(const MlpModel& m, std::vector<double> a) {
    const auto& layers = m.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        std::vector<double> z(layers[l].out);
        for (std::size_t o = 0; o < z.size(); ++o) {
            z[o] = layers[l].bias[o];
            for (std::size_t i = 0; i < a.size(); ++i) z[o] += layers[l].weights[o * layers[l].in + i] * a[i];
            if (l + 1 < layers.size()) z[o] = z[o] > 0 ? z[o] : 0.0;
        }
        a = z;
    }
    const double e0 = std::exp(a[0]), e1 = std::exp(a[1]);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

MlpModel random_model(std::uint64_t seed) {
    auto m = MlpModel::he_uniform({6, 12, 9, 2}, seed);
    Rng rng(seed + 100);
    for (auto& L : m.layers()) {
        for (double& b : L.bias) b = rng.uniform(-0.3, 0.3);
    }
    return m;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

} // namespace

TEST(Forward, ZeroWeightsGiveHalf) {
    const auto m = MlpModel::zeros({4, 5, 2});
    const auto p = m.forward(std::vector<double>{0.1, 0.7, 0.2, 0.9});
    EXPECT_EQ(p[0], 0.5);
    EXPECT_EQ(p[1], 0.5);
}

TEST(Forward, LinearClosedForm) {
    const std::vector<double> w{0.5, -1.5, 2.0};
    const auto m = linear_model(w, 0.25);
    const std::vector<double> x{0.2, 0.4, 0.9};
    const double z = 0.5 * 0.2 - 1.5 * 0.4 + 2.0 * 0.9 + 0.25;
    EXPECT_NEAR(m.forward(x)[1], sigmoid(z), 1e-15);
}

TEST(Forward, MatchesReferenceImplementation) {
    const auto m = random_model(4);
    Rng rng(8);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> x(6);
        for (double& v : x) v = rng.uniform();
        const auto p = m.forward(x);
        const auto q = reference_forward(m, x);
        EXPECT_NEAR(p[0], q[0], 1e-12);
        EXPECT_NEAR(p[1], q[1], 1e-12);
    }
}

TEST(Forward, ProbabilitiesSumToOne) {
    Rng rng(2);
    for (int s = 0; s < 5; ++s) {
        const auto m = random_model(static_cast<std::uint64_t>(s));
        for (int t = 0; t < 200; ++t) {
            std::vector<double> x(6);
            for (double& v : x) v = rng.uniform(-50, 50);
            const auto p = m.forward(x);
            EXPECT_NEAR(p[0] + p[1], 1.0, 1e-9);
            EXPECT_GE(p[0], 0.0);
            EXPECT_GE(p[1], 0.0);
        }
    }
}

TEST(Forward, ArityMismatch) {
    const auto m = MlpModel::zeros({3, 2});
    EXPECT_THROW(m.forward(std::vector<double>{1, 2}), ConfigError);
}

TEST(LossGradient, LinearClosedForm) {
    const std::vector<double> w{0.5, -1.5, 2.0};
    const auto m = linear_model(w, 0.25);
    const std::vector<double> x{0.2, 0.4, 0.9};
    for (int y : {0, 1}) {
        const auto lg = m.loss_gradient(x, y);
        const double p1 = m.forward(x)[1];
        EXPECT_NEAR(lg.loss, -std::log(y == 1 ? p1 : 1 - p1), 1e-12);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(lg.grad[i], (p1 - y) * w[i], 1e-12);
    }
}

TEST(LossGradient, SaturatedCorrectPredictionHasVanishingGradient) {
    const auto m = linear_model({40.0, 0.0}, 0.0);
    const auto lg = m.loss_gradient(std::vector<double>{1.0, 0.5}, 1);
    EXPECT_LT(l2_norm(lg.grad), 1e-15);
    EXPECT_LT(lg.loss, 1e-15);
}

TEST(LossGradient, MatchesCentralDifferences) {
    Rng rng(31);
    int probes = 0;
    for (int s = 0; probes < 100; ++s) {
        const auto m = random_model(static_cast<std::uint64_t>(s));
        for (int t = 0; t < 10; ++t, ++probes) {
            std::vector<double> x(6);
            for (double& v : x) v = rng.uniform();
            const int y = static_cast<int>(rng.index(2));
            const auto g = m.loss_gradient(x, y).grad;
            for (std::size_t i = 0; i < 6; ++i) {
                const double h = 1e-6;
                auto xp = x, xm = x;
                xp[i] += h;
                xm[i] -= h;
                const double fd = (m.loss_gradient(xp, y).loss - m.loss_gradient(xm, y).loss) / (2 * h);
                const double rel = std::abs(fd - g[i]) / std::max({std::abs(fd), std::abs(g[i]), 1e-4});
                ASSERT_LE(rel, 1e-5) << "probe " << probes << " feature " << i;
            }
        }
    }
}

TEST(ParameterGradient, MatchesCentralDifferences) {
    auto m = random_model(12);
    const std::vector<double> x{0.1, 0.5, 0.9, 0.3, 0.7, 0.2};
    auto g = m.zero_gradient();
    m.accumulate_parameter_gradient(x, 1, g);
    for (std::size_t l = 0; l < m.layers().size(); ++l) {
        for (std::size_t k = 0; k < m.layers()[l].weights.size(); k += 7) {
            const double h = 1e-6;
            const double w0 = m.layers()[l].weights[k];
            m.layers()[l].weights[k] = w0 + h;
            const double up = m.loss_gradient(x, 1).loss;
            m.layers()[l].weights[k] = w0 - h;
            const double down = m.loss_gradient(x, 1).loss;
            m.layers()[l].weights[k] = w0;
            EXPECT_NEAR((up - down) / (2 * h), g.weights[l][k], 1e-6);
        }
    }
}

TEST(Train, SeparableDataReachesHighAccuracy) {
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.seed = 2;
    const auto init = MlpModel::he_uniform({8, 32, 32, 2}, 2);
    const auto result = train(init, *demo_train(), cfg);
    const auto xs = scaled_rows(*demo_train());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) correct += result.model.predict(xs[i]) == demo_train()->labels[i];
    EXPECT_GE(static_cast<double>(correct) / static_cast<double>(xs.size()), 0.95);
    EXPECT_EQ(result.history.loss.size(), 50u);
    EXPECT_EQ(result.history.validation_auc.size(), 50u);
    EXPECT_GT(auc(result.model, *demo_eval()), 0.9);
}

TEST(Train, ZeroEpochsReturnsInit) {
    TrainConfig cfg;
    cfg.epochs = 0;
    const auto init = MlpModel::he_uniform({8, 4, 2}, 1);
    const auto r = train(init, *demo_train(), cfg);
    EXPECT_EQ(model_to_json(r.model), model_to_json(init));
    EXPECT_TRUE(r.history.loss.empty());
}

TEST(Train, CheckpointHasTheBestValidationAuc) {
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.seed = 4;
    const auto r = train(MlpModel::he_uniform({8, 16, 2}, 4), *demo_train(), cfg);
    const auto& aucs = r.history.validation_auc;
    ASSERT_EQ(aucs.size(), 20u);
    ASSERT_GE(r.history.best_epoch, 1u);
    const double best = *std::max_element(aucs.begin(), aucs.end());
    EXPECT_EQ(aucs[r.history.best_epoch - 1], best);
    // the demo classes are separated, so AUC saturates early and the tie goes to a later, lower-loss epoch
    const auto first = static_cast<std::size_t>(std::find(aucs.begin(), aucs.end(), best) - aucs.begin()) + 1;
    EXPECT_EQ(best, 1.0);
    EXPECT_GT(r.history.best_epoch, first);
}

TEST(Train, DeterministicWeights) {
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.seed = 9;
    const auto init = MlpModel::he_uniform({8, 16, 2}, 3);
    const auto a = train(init, *demo_train(), cfg);
    const auto b = train(init, *demo_train(), cfg);
    EXPECT_EQ(model_to_json(a.model).dump(), model_to_json(b.model).dump());
    cfg.adversarial = true;
    cfg.adv_epsilon = 0.2;
    cfg.adv_steps = 3;
    EXPECT_EQ(model_to_json(train(init, *demo_train(), cfg).model).dump(),
              model_to_json(train(init, *demo_train(), cfg).model).dump());
}

TEST(Train, AdversarialTrainingIgnoresRelationConstraints) {
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.adversarial = true;
    cfg.adv_epsilon = 0.3;
    cfg.adv_steps = 5;
    const auto init = MlpModel::he_uniform({8, 16, 2}, 5);
    Dataset bare = *demo_train();
    bare.constraints = nullptr;
    const auto with = train(init, *demo_train(), cfg);
    const auto without = train(init, bare, cfg);
    EXPECT_EQ(model_to_json(with.model).dump(), model_to_json(without.model).dump());
}

TEST(Train, MadryExampleStaysInBallAndBox) {
    const auto m = random_model(1);
    const std::vector<double> x{0.0, 1.0, 0.5, 0.5, 0.99, 0.01};
    const auto adv = madry_example(m, x, 1, 0.3, 10);
    EXPECT_LE(l2_distance(adv, x), 0.3 + 1e-12);
    EXPECT_TRUE(in_box(adv));
    EXPECT_GE(m.loss_gradient(adv, 1).loss, m.loss_gradient(x, 1).loss);
}

TEST(Train, DivergenceAborts) {
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.learning_rate = 1e300;
    const auto init = MlpModel::he_uniform({8, 16, 2}, 5);
    EXPECT_THROW(train(init, *demo_train(), cfg), TrainingError);
}

TEST(Train, ConfigValidation) {
    TrainConfig cfg;
    cfg.learning_rate = 0;
    EXPECT_THROW(train(MlpModel::zeros({8, 2}), *demo_train(), cfg), ConfigError);
    cfg = {};
    cfg.batch_size = 0;
    EXPECT_THROW(train(MlpModel::zeros({8, 2}), *demo_train(), cfg), ConfigError);
}

TEST(Auc, PerfectAndConstant) {
    EXPECT_EQ(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1}), 1.0);
    EXPECT_EQ(auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, std::vector<int>{0, 1, 0, 1}), 0.5);
    EXPECT_EQ(auc(std::vector<double>{0.9, 0.8, 0.2}, std::vector<int>{0, 0, 1}), 0.0);
}

TEST(Auc, MatchesPairwiseCount) {
    Rng rng(6);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> s(30);
        std::vector<int> y(30);
        for (std::size_t i = 0; i < 30; ++i) {
            s[i] = static_cast<double>(rng.index(10)) / 10.0; // ties on purpose
            y[i] = static_cast<int>(i % 2 == 0 ? 1 : rng.index(2));
        }
        y[1] = 0;
        double wins = 0;
        double pairs = 0;
        for (std::size_t i = 0; i < 30; ++i) {
            for (std::size_t j = 0; j < 30; ++j) {
                if (y[i] != 1 || y[j] != 0) continue;
                pairs += 1;
                wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
            }
        }
        EXPECT_NEAR(auc(s, y), wins / pairs, 1e-12);
    }
}

TEST(Auc, SingleClassIsAnError) {
    EXPECT_THROW(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), ConfigError);
}

TEST(Serialize, RoundTripIsExact) {
    auto m = random_model(3);
    m.fingerprint = "test";
    const auto dir = temp_dir("model");
    save_model(dir / "m.json", m);
    const auto back = load_model(dir / "m.json");
    EXPECT_EQ(model_to_json(back), model_to_json(m));
    for (std::size_t l = 0; l < m.layers().size(); ++l) EXPECT_EQ(back.layers()[l].weights, m.layers()[l].weights);
}

TEST(Serialize, MalformedFile) {
    EXPECT_THROW(model_from_json(nlohmann::json{{"layer_sizes", {3, 2}}}), ConfigError);
}

TEST(Access, LevelsAreEnforcedAndCounted) {
    auto m = std::make_shared<const MlpModel>(random_model(1));
    const std::vector<double> x(6, 0.5);
    ModelAccess wb(m, AccessLevel::whitebox);
    wb.probabilities(x);
    wb.loss_gradient(x, 1);
    const ModelAccess copy = wb;
    copy.probabilities(x);
    EXPECT_EQ(wb.queries(), 2u);
    EXPECT_EQ(wb.gradient_calls(), 1u);
    const auto q = wb.restricted(AccessLevel::query_proba);
    EXPECT_EQ(q.queries(), 0u);
    EXPECT_THROW(q.loss_gradient(x, 1), AccessError);
    EXPECT_NO_THROW(q.probabilities(x));
    EXPECT_THROW(wb.restricted(AccessLevel::none).probabilities(x), AccessError);
}
