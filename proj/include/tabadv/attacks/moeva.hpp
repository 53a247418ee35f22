#ifndef TABADV_ATTACKS_MOEVA_HPP
#define TABADV_ATTACKS_MOEVA_HPP

#include <array>
#include <optional>

#include "tabadv/attacks/domain.hpp"
#include "tabadv/attacks/nondominated.hpp"
#include "tabadv/core/random.hpp"

namespace tabadv {

struct MoevaConfig {
    std::size_t n_generations = 100;
    std::size_t population_size = 200;
    std::size_t n_offspring = 100;
    double epsilon = 0.5;
    double crossover_rate = 0.9;
    double mutation_rate = 0.3;
    double mutation_sigma = 0.25; ///< Gaussian mutation scale, as a fraction of epsilon
    double init_sigma = 0.25;     ///< initial population spread, as a fraction of epsilon
    bool enforce_constraints = true;
    std::uint64_t seed = 0;

    void validate() const {
        if (population_size < 1 || n_offspring < 1) throw ConfigError("moeva: counts must be at least 1");
        if (!(epsilon > 0.0)) throw ConfigError("moeva: epsilon must be positive");
        if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0) || !(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
            throw ConfigError("moeva: rates must lie in [0, 1]");
        }
        if (!(mutation_sigma >= 0.0) || !(init_sigma >= 0.0)) throw ConfigError("moeva: sigmas must be non-negative");
    }

    /// Upper bound on model queries for one example.
    std::uint64_t query_budget() const {
        return static_cast<std::uint64_t>(population_size) +
               static_cast<std::uint64_t>(n_generations) * static_cast<std::uint64_t>(n_offspring);
    }
};

/// (probability of the true class, L2 distance, g), all minimised.
using Objectives = std::array<double, 3>;

/// Mutable features only, in scaled units; immutable ones are not part of
/// the search space at all.
using Genome = std::vector<double>;

/// Which features a genome carries and how to keep each gene on its type grid.
class GenomeLayout {
public:
    explicit GenomeLayout(const AttackDomain& domain) : scaler_(&domain.scaler()) {
        const Schema& schema = domain.schema();
        for (std::size_t i = 0; i < schema.size(); ++i) {
            if (!domain.mask()[i]) continue;
            genes_.push_back(i);
            types_.push_back(schema[i].type);
            std::vector<double> levels;
            for (double l : schema[i].levels) levels.push_back(scaler_->scale(i, l));
            levels_.push_back(std::move(levels));
        }
    }

    std::size_t size() const { return genes_.size(); }
    std::size_t feature(std::size_t g) const { return genes_[g]; }
    FeatureType type(std::size_t g) const { return types_[g]; }
    const std::vector<double>& levels(std::size_t g) const { return levels_[g]; }

    /// Nearest integral original value, expressed in scaled units.
    double snap_discrete(std::size_t g, double s) const {
        const std::size_t f = genes_[g];
        return scaler_->scale(f, std::round(scaler_->unscale(f, s)));
    }

    Genome encode(std::span<const double> scaled) const {
        Genome out(genes_.size());
        for (std::size_t g = 0; g < genes_.size(); ++g) out[g] = scaled[genes_[g]];
        return out;
    }

    std::vector<double> decode(const Genome& genome, std::span<const double> x0_scaled) const {
        std::vector<double> out(x0_scaled.begin(), x0_scaled.end());
        for (std::size_t g = 0; g < genes_.size(); ++g) out[genes_[g]] = genome[g];
        return out;
    }

private:
    const Scaler* scaler_;
    std::vector<std::size_t> genes_;
    std::vector<FeatureType> types_;
    std::vector<std::vector<double>> levels_;
};

/// Offspring of consecutive parent pairs (p0,p1), (p2,p3), ... Continuous
/// and discrete genes use blend crossover and bounded Gaussian mutation;
/// discrete genes are then rounded, categorical genes are inherited from one
/// parent or resampled. Genes that neither operator touched are copied bit-exact.
inline std::vector<Genome> variation(std::span<const Genome> parents, const GenomeLayout& layout,
                                     const MoevaConfig& cfg, std::size_t n_children, Rng& rng) {
    if (parents.empty()) throw ConfigError("variation needs at least one parent");
    const double sigma = cfg.mutation_sigma * cfg.epsilon;
    std::vector<Genome> children;
    children.reserve(n_children);
    for (std::size_t c = 0; c < n_children; ++c) {
        const Genome& a = parents[(2 * c) % parents.size()];
        const Genome& b = parents[(2 * c + 1) % parents.size()];
        Genome child = a;
        std::vector<bool> touched(child.size(), false);
        if (rng.bernoulli(cfg.crossover_rate)) {
            for (std::size_t g = 0; g < child.size(); ++g) {
                if (layout.type(g) == FeatureType::categorical) {
                    if (rng.bernoulli(0.5)) child[g] = b[g];
                } else {
                    const double u = rng.uniform(-0.25, 1.25);
                    child[g] = std::clamp(a[g] + u * (b[g] - a[g]), 0.0, 1.0);
                    touched[g] = true;
                }
            }
        }
        for (std::size_t g = 0; g < child.size(); ++g) {
            if (!rng.bernoulli(cfg.mutation_rate)) continue;
            if (layout.type(g) == FeatureType::categorical) {
                const auto& lv = layout.levels(g);
                child[g] = lv[rng.index(lv.size())];
            } else {
                child[g] = std::clamp(child[g] + rng.normal(0.0, sigma), 0.0, 1.0);
                touched[g] = true;
            }
        }
        for (std::size_t g = 0; g < child.size(); ++g) {
            if (touched[g] && layout.type(g) == FeatureType::discrete) {
                child[g] = std::clamp(layout.snap_discrete(g, child[g]), 0.0, 1.0);
            }
        }
        children.push_back(std::move(child));
    }
    return children;
}

struct Individual {
    Genome genome;
    Objectives objectives{};
    bool feasible = false;
    Probabilities proba{};
};

/// One model query: scores a decoded candidate.
inline Objectives moeva_objectives(const AttackDomain& domain, const ModelAccess& model, const Example& ex,
                                   std::span<const double> candidate, bool enforce, Probabilities* proba = nullptr) {
    const auto p = model.probabilities(candidate);
    if (proba) *proba = p;
    double g = 0.0;
    if (enforce && !domain.constraints().empty()) {
        g = total_penalty(domain.constraints(), to_original(domain, ex, candidate), ex.original);
    }
    return {p[static_cast<std::size_t>(ex.label)], l2_distance(candidate, ex.scaled), g};
}

/// Evolutionary search result with the per-generation success record.
struct MoevaTrace {
    std::vector<bool> archive_filled_after_generation; ///< index 0 = initial population
};

/// Query-only multi-objective search. Every candidate is projected into the
/// budget and repaired before it is scored; valid adversarial candidates go
/// to an archive that only ever improves.
inline AttackOutcome moeva(const AttackDomain& domain, const ModelAccess& model, const Example& ex,
                           const MoevaConfig& cfg, MoevaTrace* trace = nullptr) {
    cfg.validate();
    Stopwatch clock;
    AttackOutcome out;
    const GenomeLayout layout(domain);
    Rng rng(derive_seed(cfg.seed, ex.index, "moeva"));
    const double tol = domain.constraints().satisfaction_tol();

    struct Archived {
        std::vector<double> candidate;
        double score;
    };
    std::optional<Archived> archive;

    auto evaluate = [&](Genome genome) -> Individual {
        Individual ind;
        std::vector<double> x;
        try {
            x = project_and_repair(domain, ex, layout.decode(genome, ex.scaled), cfg.epsilon, cfg.enforce_constraints);
            ind.objectives = moeva_objectives(domain, model, ex, x, cfg.enforce_constraints, &ind.proba);
        } catch (const EvaluationError&) {
            x = ex.scaled;
            ind.objectives = moeva_objectives(domain, model, ex, x, false, &ind.proba);
            ind.objectives[2] = std::numeric_limits<double>::infinity();
        }
        ++out.queries;
        ind.genome = layout.encode(x);
        ind.feasible = ind.objectives[2] <= tol;
        if (predicted_class(ind.proba) != ex.label && within_budget(domain, ex, x, cfg.epsilon) &&
            attacker_valid(domain, ex, x, cfg.enforce_constraints)) {
            if (!archive || ind.objectives[0] < archive->score) {
                archive = Archived{x, ind.objectives[0]};
            }
        }
        return ind;
    };

    std::vector<Individual> population;
    population.reserve(cfg.population_size + cfg.n_offspring);
    const Genome origin = layout.encode(ex.scaled);
    for (std::size_t i = 0; i < cfg.population_size; ++i) {
        Genome g = origin;
        for (double& v : g) v += rng.normal(0.0, cfg.init_sigma * cfg.epsilon);
        population.push_back(evaluate(std::move(g)));
    }
    if (trace) trace->archive_filled_after_generation.push_back(archive.has_value());

    std::vector<std::size_t> rank(population.size(), 0);
    auto refresh_ranks = [&] {
        std::vector<Objectives> objs;
        for (const auto& ind : population) objs.push_back(ind.objectives);
        rank = nondominated_ranks<3>(objs);
    };
    refresh_ranks();
    auto better = [&](std::size_t a, std::size_t b) {
        if (rank[a] != rank[b]) return rank[a] < rank[b];
        if (population[a].feasible != population[b].feasible) return population[a].feasible;
        return population[a].objectives[0] < population[b].objectives[0];
    };

    for (std::size_t gen = 0; gen < cfg.n_generations; ++gen) {
        std::vector<Genome> parents;
        parents.reserve(2 * cfg.n_offspring);
        for (std::size_t k = 0; k < 2 * cfg.n_offspring; ++k) {
            const std::size_t a = rng.index(population.size());
            const std::size_t b = rng.index(population.size());
            parents.push_back(population[better(b, a) ? b : a].genome);
        }
        auto children = variation(parents, layout, cfg, cfg.n_offspring, rng);
        for (auto& child : children) {
            population.push_back(evaluate(std::move(child)));
        }
        std::vector<Objectives> objs;
        std::vector<bool> feasible;
        for (const auto& ind : population) {
            objs.push_back(ind.objectives);
            feasible.push_back(ind.feasible);
        }
        const auto keep = select_survivors<3>(objs, feasible, cfg.population_size);
        std::vector<Individual> next;
        next.reserve(cfg.population_size + cfg.n_offspring);
        for (std::size_t i : keep) next.push_back(std::move(population[i]));
        population = std::move(next);
        refresh_ranks();
        if (trace) trace->archive_filled_after_generation.push_back(archive.has_value());
    }

    if (archive) {
        out.candidate = archive->candidate;
    } else {
        const auto best = std::min_element(population.begin(), population.end(), [](const auto& a, const auto& b) {
            if (a.feasible != b.feasible) return a.feasible;
            return a.objectives[0] < b.objectives[0];
        });
        out.candidate = layout.decode(best->genome, ex.scaled);
    }
    // The decision reuses the probabilities already queried for this candidate.
    Probabilities p{};
    if (archive) {
        p = {0.0, 0.0};
        p[static_cast<std::size_t>(ex.label)] = archive->score;
        p[static_cast<std::size_t>(1 - ex.label)] = 1.0 - archive->score;
    } else {
        const auto best = std::min_element(population.begin(), population.end(), [](const auto& a, const auto& b) {
            if (a.feasible != b.feasible) return a.feasible;
            return a.objectives[0] < b.objectives[0];
        });
        p = best->proba;
    }
    record(out, assess(domain, ex, out.candidate, cfg.epsilon, p));
    out.wall_time = clock.seconds();
    return out;
}

} // namespace tabadv

#endif
