#ifndef TABADV_DATA_SAMPLING_HPP
#define TABADV_DATA_SAMPLING_HPP

#include <algorithm>
#include <cmath>
#include <set>

#include "tabadv/data/synthetic.hpp"

namespace tabadv {

/// How much of the target's training data an attacker holds.
enum class DataAccess { full, subset, distribution };

inline const char* to_string(DataAccess a) {
    switch (a) {
    case DataAccess::full: return "full";
    case DataAccess::subset: return "subset";
    case DataAccess::distribution: return "distribution";
    }
    return "?";
}

inline constexpr double default_subset_fraction = 0.10;

/// Stratified sample without replacement: round(fraction * n_c) rows of
/// each class c (at least one when the class is present), original order kept.
inline Dataset stratified_subset(const Dataset& data, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ConfigError("subset fraction must lie in (0, 1]");
    }
    Rng rng(derive_seed(seed, 0, "subset"));
    std::vector<std::size_t> picked;
    for (int label : {0, 1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.labels[i] == label) idx.push_back(i);
        }
        if (idx.empty()) continue;
        auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
        k = std::clamp<std::size_t>(k, 1, idx.size());
        rng.shuffle(idx);
        picked.insert(picked.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    }
    std::sort(picked.begin(), picked.end());
    return data.subset(picked);
}

/// A same-distribution set disjoint from `train`: a fresh generator draw for
/// synthetic data, or the reserved split of a CSV dataset.
inline Dataset distribution_sample(const Dataset& train, std::uint64_t seed) {
    if (train.source) {
        auto cfg = std::make_shared<GeneratorConfig>(*train.source->config);
        cfg->n = train.size();
        Dataset fresh = generate_synthetic(cfg, derive_seed(train.source->seed, seed, "distribution"));
        std::set<std::vector<double>> seen(train.rows.begin(), train.rows.end());
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < fresh.size(); ++i) {
            if (!seen.count(fresh.rows[i])) keep.push_back(i);
        }
        Dataset out = fresh.subset(keep);
        out.source = GeneratorSource{cfg, derive_seed(train.source->seed, seed, "distribution")};
        return out;
    }
    if (train.reserve) {
        return *train.reserve;
    }
    throw ConfigError("distribution-level access needs a synthetic generator or a reserved split");
}

inline DatasetPtr sample_access(const DatasetPtr& train, DataAccess level, std::uint64_t seed,
                                double fraction = default_subset_fraction) {
    switch (level) {
    case DataAccess::full: return train;
    case DataAccess::subset: return std::make_shared<const Dataset>(stratified_subset(*train, fraction, seed));
    case DataAccess::distribution: return std::make_shared<const Dataset>(distribution_sample(*train, seed));
    }
    return train;
}

} // namespace tabadv

#endif
