#ifndef TABADV_DATA_SYNTHETIC_HPP
#define TABADV_DATA_SYNTHETIC_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "tabadv/constraints/repair.hpp"
#include "tabadv/core/random.hpp"
#include "tabadv/data/dataset.hpp"

namespace tabadv {

/// Synthetic data: features drawn uniformly within bounds, assignment
/// constraints computed from their defining expressions, rejection on any
/// other violation. Labels come from a noisy linear score over scaled
/// features; the top `positive_fraction` of scores is labelled 1. With a
/// positive `margin`, the threshold comes from a pilot draw of `n` rows and
/// rows scoring within margin/2 of it are rejected, so the classes are
/// separated by a band of width `margin` in score.
struct GeneratorConfig {
    SchemaPtr schema;
    ConstraintSetPtr constraints;
    std::size_t n = 500;
    double positive_fraction = 0.5;
    std::vector<double> weights; ///< one per feature, scaled space
    double noise = 0.1;
    double margin = 0.0;
    std::size_t max_attempts_per_row = 1000;
};

inline GeneratorConfig generator_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    try {
        GeneratorConfig cfg;
        auto schema = std::make_shared<const Schema>(load_schema(base_dir / j.at("schema").get<std::string>()));
        cfg.schema = schema;
        std::optional<std::filesystem::path> cpath = schema->constraints_path;
        if (j.contains("constraints")) cpath = base_dir / j.at("constraints").get<std::string>();
        cfg.constraints = cpath ? std::make_shared<const ConstraintSet>(load_constraints(*cpath, schema))
                                : std::make_shared<const ConstraintSet>(schema);
        cfg.n = j.value("n", cfg.n);
        cfg.positive_fraction = j.value("positive_fraction", cfg.positive_fraction);
        cfg.noise = j.value("noise", cfg.noise);
        cfg.margin = j.value("margin", cfg.margin);
        cfg.max_attempts_per_row = j.value("max_attempts_per_row", cfg.max_attempts_per_row);
        cfg.weights.assign(schema->size(), 0.0);
        for (const auto& [name, w] : j.at("weights").items()) {
            cfg.weights[schema->index_of(name)] = w.get<double>();
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed generator config: ") + e.what());
    }
}

inline GeneratorConfig load_generator(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open generator config " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return generator_from_json(j, path.parent_path());
}

namespace detail {

inline double draw_feature(const FeatureSpec& f, Rng& rng) {
    switch (f.type) {
    case FeatureType::continuous: return rng.uniform(f.lower, f.upper);
    case FeatureType::discrete:
        return f.lower + static_cast<double>(rng.index(static_cast<std::size_t>(f.upper - f.lower) + 1));
    case FeatureType::categorical: return f.levels[rng.index(f.levels.size())];
    }
    return f.lower;
}

} // namespace detail

inline Dataset generate_synthetic(std::shared_ptr<const GeneratorConfig> cfg, std::uint64_t seed) {
    const Schema& schema = *cfg->schema;
    if (!cfg->constraints || &cfg->constraints->schema() != &schema) {
        throw ConfigError("generator constraints must be linked to the generator schema");
    }
    if (cfg->weights.size() != schema.size()) {
        throw ConfigError("generator needs one weight per feature");
    }
    if (!(cfg->positive_fraction >= 0.0 && cfg->positive_fraction <= 1.0)) {
        throw ConfigError("positive_fraction must lie in [0,1]");
    }
    if (!(cfg->margin >= 0.0)) throw ConfigError("margin must be non-negative");
    Rng rng(derive_seed(seed, 0, "synthetic"));
    const Scaler scaler(schema);
    const std::size_t budget = cfg->max_attempts_per_row * std::max<std::size_t>(cfg->n, 1);
    std::size_t attempts = 0;
    // one feasible row with its noisy score
    auto draw = [&]() -> std::pair<std::vector<double>, double> {
        for (;;) {
            if (++attempts > budget) {
                throw ConfigError("synthetic generator rejected too many rows; constraints too tight for uniform sampling");
            }
            std::vector<double> row(schema.size());
            for (std::size_t i = 0; i < schema.size(); ++i) {
                row[i] = detail::draw_feature(schema[i], rng);
            }
            try {
                repair_assignments(*cfg->constraints, row, row);
            } catch (const EvaluationError&) {
                continue;
            }
            if (!check(row, *cfg->constraints).valid || total_penalty(*cfg->constraints, row, row) != 0.0) {
                continue;
            }
            double s = 0.0;
            for (std::size_t i = 0; i < schema.size(); ++i) {
                s += cfg->weights[i] * scaler.scale(i, row[i]);
            }
            return {std::move(row), s + cfg->noise * rng.normal()};
        }
    };

    Dataset d{cfg->schema, cfg->constraints, {}, {}, GeneratorSource{cfg, seed}, nullptr};
    const auto n_pos = static_cast<std::size_t>(std::llround(cfg->positive_fraction * static_cast<double>(cfg->n)));
    std::vector<std::pair<std::vector<double>, double>> pool;
    pool.reserve(cfg->n);
    while (pool.size() < cfg->n) pool.push_back(draw());
    std::vector<std::size_t> order(cfg->n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pool[a].second > pool[b].second; });

    if (cfg->margin == 0.0) {
        d.labels.assign(cfg->n, 0);
        for (std::size_t k = 0; k < n_pos; ++k) d.labels[order[k]] = 1;
        for (auto& [row, s] : pool) d.rows.push_back(std::move(row));
        return d;
    }

    // pilot threshold halfway between the last positive and the first negative
    double t = 0.0;
    if (n_pos == 0) t = pool[order.back()].second;
    else if (n_pos == cfg->n) t = pool[order[n_pos - 1]].second;
    else t = 0.5 * (pool[order[n_pos - 1]].second + pool[order[n_pos]].second);
    const double half = 0.5 * cfg->margin;
    std::size_t pos = 0, neg = 0;
    auto take = [&](std::vector<double> row, double s) {
        if (s >= t + half && pos < n_pos) {
            ++pos;
            d.rows.push_back(std::move(row));
            d.labels.push_back(1);
        } else if (s <= t - half && neg < cfg->n - n_pos) {
            ++neg;
            d.rows.push_back(std::move(row));
            d.labels.push_back(0);
        }
    };
    for (auto& [row, s] : pool) take(std::move(row), s);
    while (d.rows.size() < cfg->n) {
        auto [row, s] = draw();
        take(std::move(row), s);
    }
    return d;
}

} // namespace tabadv

#endif
