// Shared fixtures and random generators for the test binaries.
#ifndef TABADV_TESTS_SUPPORT_HPP
#define TABADV_TESTS_SUPPORT_HPP

#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "tabadv/tabadv.hpp"

namespace tabadv::testing {

inline std::filesystem::path demo_dir() { return TABADV_DEMO_DIR; }

inline SchemaPtr continuous_schema(std::size_t d, double lower = -10.0, double upper = 10.0) {
    std::vector<FeatureSpec> f;
    for (std::size_t i = 0; i < d; ++i) {
        f.push_back({"f" + std::to_string(i), FeatureType::continuous, true, lower, upper, {}});
    }
    return std::make_shared<const Schema>(std::move(f), "y");
}

inline SchemaPtr demo_schema() {
    static const auto s = std::make_shared<const Schema>(load_schema(demo_dir() / "schema.json"));
    return s;
}

inline ConstraintSetPtr demo_constraints() {
    static const auto c =
        std::make_shared<const ConstraintSet>(load_constraints(demo_dir() / "constraints.txt", demo_schema()));
    return c;
}

inline std::shared_ptr<const GeneratorConfig> demo_generator() {
    static const auto g = [] {
        auto cfg = load_generator(demo_dir() / "generator.json");
        // share the cached schema so datasets and constraint sets agree
        cfg.schema = demo_schema();
        cfg.constraints = demo_constraints();
        return std::make_shared<const GeneratorConfig>(std::move(cfg));
    }();
    return g;
}

inline DatasetPtr demo_train() {
    static const auto d = std::make_shared<const Dataset>(generate_synthetic(demo_generator(), 7));
    return d;
}

inline DatasetPtr demo_eval() {
    static const auto d = [] {
        auto g = std::make_shared<GeneratorConfig>(*demo_generator());
        g->n = 200;
        return std::make_shared<const Dataset>(generate_synthetic(g, derive_seed(7, 0, "eval")));
    }();
    return d;
}

inline TrainConfig demo_train_config() {
    TrainConfig t;
    t.epochs = 60;
    t.batch_size = 32;
    t.learning_rate = 0.05;
    t.seed = 11;
    return t;
}

inline std::shared_ptr<const MlpModel> demo_standard_model() {
    static const auto m = [] {
        const auto init = MlpModel::he_uniform({8, 32, 32, 2}, 11);
        return std::make_shared<const MlpModel>(train(init, *demo_train(), demo_train_config()).model);
    }();
    return m;
}

/// Logits (0, w.x + b): p1 = sigmoid(w.x + b).
inline MlpModel linear_model(const std::vector<double>& w, double b) {
    DenseLayer L;
    L.in = w.size();
    L.out = 2;
    L.weights.assign(2 * w.size(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) L.w(1, i) = w[i];
    L.bias = {0.0, b};
    return MlpModel({L}, 0);
}

inline NumericPtr random_numeric(Rng& rng, std::size_t d, int depth, bool division) {
    const double pick = rng.uniform();
    if (depth <= 0 || pick < 0.35) {
        const double leaf = rng.uniform();
        if (leaf < 0.5) return feature(rng.index(d));
        if (leaf < 0.7) return original(rng.index(d));
        return constant(static_cast<double>(static_cast<int>(rng.index(7)) - 3));
    }
    const std::size_t n_ops = division ? 4 : 3;
    const auto op = static_cast<ArithOp>(rng.index(n_ops));
    auto l = random_numeric(rng, d, depth - 1, division);
    auto r = random_numeric(rng, d, depth - 1, division);
    if (op == ArithOp::div) {
        // keep the denominator away from zero: (r*r + 1)
        r = binary(ArithOp::add, binary(ArithOp::mul, r, r), constant(1.0));
    }
    return binary(op, l, r);
}

/// Random constraint tree of depth <= `depth` over features 0..d-1.
inline ConstraintPtr random_constraint(Rng& rng, std::size_t d, int depth, bool division = false) {
    const double pick = rng.uniform();
    if (depth > 1 && pick < 0.3) {
        return conj(random_constraint(rng, d, depth - 1, division), random_constraint(rng, d, depth - 1, division));
    }
    if (depth > 1 && pick < 0.6) {
        return disj(random_constraint(rng, d, depth - 1, division), random_constraint(rng, d, depth - 1, division));
    }
    const int sub = std::max(depth - 2, 0);
    if (rng.uniform() < 0.15) {
        std::vector<NumericPtr> set;
        const std::size_t n = 1 + rng.index(3);
        for (std::size_t k = 0; k < n; ++k) set.push_back(random_numeric(rng, d, sub, division));
        return membership(random_numeric(rng, d, sub, division), set);
    }
    const auto rel = static_cast<Relation>(rng.index(6));
    return compare(rel, random_numeric(rng, d, sub, division), random_numeric(rng, d, sub, division));
}

/// Points on a half-integer grid so that equalities and ties occur often.
inline std::vector<double> grid_point(Rng& rng, std::size_t d) {
    std::vector<double> x(d);
    for (double& v : x) v = 0.5 * static_cast<double>(rng.index(7));
    return x;
}

// Smallest distance of any hinge, abs or min-tie argument to its kink.
inline double kink_distance(const ConstraintExpr& c, std::span<const double> x, std::span<const double> x0, double tau) {
    double best = std::numeric_limits<double>::infinity();
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AndNode>) {
                best = std::min(kink_distance(*n.lhs, x, x0, tau), kink_distance(*n.rhs, x, x0, tau));
            } else if constexpr (std::is_same_v<T, OrNode>) {
                best = std::min(kink_distance(*n.lhs, x, x0, tau), kink_distance(*n.rhs, x, x0, tau));
                best = std::min(best, std::abs(penalty(*n.lhs, x, x0, tau) - penalty(*n.rhs, x, x0, tau)));
            } else if constexpr (std::is_same_v<T, CompareNode>) {
                const double u = evaluate(*n.lhs, x, x0) - evaluate(*n.rhs, x, x0);
                best = std::min({std::abs(u), std::abs(u + tau), std::abs(u - tau), std::abs(std::abs(u) - tau)});
            } else {
                const double v = evaluate(*n.expr, x, x0);
                std::vector<double> d;
                for (const auto& s : n.set) d.push_back(std::abs(v - evaluate(*s, x, x0)));
                for (std::size_t i = 0; i < d.size(); ++i) {
                    best = std::min(best, d[i]);
                    for (std::size_t j = i + 1; j < d.size(); ++j) best = std::min(best, std::abs(d[i] - d[j]));
                }
            }
        },
        c.node);
    return best;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("tabadv_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace tabadv::testing

#endif
