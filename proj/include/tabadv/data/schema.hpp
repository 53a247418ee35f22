#ifndef TABADV_DATA_SCHEMA_HPP
#define TABADV_DATA_SCHEMA_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tabadv/core/error.hpp"

namespace tabadv {

enum class FeatureType { continuous, discrete, categorical };

inline const char* to_string(FeatureType t) {
    switch (t) {
    case FeatureType::continuous: return "continuous";
    case FeatureType::discrete: return "discrete";
    case FeatureType::categorical: return "categorical";
    }
    return "?";
}

inline FeatureType feature_type_from_string(const std::string& s) {
    if (s == "continuous") return FeatureType::continuous;
    if (s == "discrete") return FeatureType::discrete;
    if (s == "categorical") return FeatureType::categorical;
    throw ConfigError("unknown feature type '" + s + "'");
}

struct FeatureSpec {
    std::string name;
    FeatureType type = FeatureType::continuous;
    bool mutable_ = true;
    double lower = 0.0;
    double upper = 1.0;
    std::vector<double> levels; ///< categorical level codes, sorted ascending

    bool is_integral_type() const { return type != FeatureType::continuous; }
};

/// Ordered feature list plus the target column name. Immutable once built.
class Schema {
public:
    Schema(std::vector<FeatureSpec> features, std::string target)
        : features_(std::move(features)), target_(std::move(target)) {
        if (features_.empty()) {
            throw ConfigError("schema has no features");
        }
        bool any_mutable = false;
        for (std::size_t i = 0; i < features_.size(); ++i) {
            auto& f = features_[i];
            if (f.name.empty()) {
                throw ConfigError("feature " + std::to_string(i) + " has an empty name");
            }
            if (!index_.emplace(f.name, i).second) {
                throw ConfigError("duplicate feature name '" + f.name + "'");
            }
            if (!(std::isfinite(f.lower) && std::isfinite(f.upper)) || f.lower > f.upper) {
                throw ConfigError("feature '" + f.name + "' has invalid bounds");
            }
            if (f.type == FeatureType::discrete &&
                (f.lower != std::floor(f.lower) || f.upper != std::floor(f.upper))) {
                throw ConfigError("discrete feature '" + f.name + "' needs integral bounds");
            }
            if (f.type == FeatureType::categorical) {
                if (f.levels.empty()) {
                    throw ConfigError("categorical feature '" + f.name + "' has no levels");
                }
                std::sort(f.levels.begin(), f.levels.end());
                f.levels.erase(std::unique(f.levels.begin(), f.levels.end()), f.levels.end());
                for (double l : f.levels) {
                    if (l < f.lower || l > f.upper) {
                        throw ConfigError("level of '" + f.name + "' outside its bounds");
                    }
                }
            } else if (!f.levels.empty()) {
                throw ConfigError("only categorical features take levels ('" + f.name + "')");
            }
            any_mutable = any_mutable || f.mutable_;
        }
        if (!any_mutable) {
            throw ConfigError("schema needs at least one mutable feature");
        }
        if (target_.empty()) {
            throw ConfigError("schema target name is empty");
        }
        if (index_.count(target_) != 0) {
            throw ConfigError("target '" + target_ + "' collides with a feature name");
        }
    }

    std::size_t size() const { return features_.size(); }
    const FeatureSpec& operator[](std::size_t i) const { return features_[i]; }
    std::span<const FeatureSpec> features() const { return features_; }
    const std::string& target() const { return target_; }

    std::optional<std::size_t> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    std::size_t index_of(const std::string& name) const {
        if (auto i = find(name)) {
            return *i;
        }
        throw ConfigError("unknown feature '" + name + "'");
    }

    std::vector<bool> mutable_mask() const {
        std::vector<bool> mask(features_.size());
        for (std::size_t i = 0; i < features_.size(); ++i) {
            mask[i] = features_[i].mutable_;
        }
        return mask;
    }

    /// Path of the constraint file named by the schema file, if any.
    std::optional<std::filesystem::path> constraints_path;

private:
    std::vector<FeatureSpec> features_;
    std::string target_;
    std::unordered_map<std::string, std::size_t> index_;
};

using SchemaPtr = std::shared_ptr<const Schema>;

inline Schema schema_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    try {
        std::vector<FeatureSpec> features;
        for (const auto& f : j.at("features")) {
            FeatureSpec spec;
            spec.name = f.at("name").get<std::string>();
            spec.type = feature_type_from_string(f.at("type").get<std::string>());
            spec.mutable_ = f.value("mutable", true);
            spec.lower = f.at("lower").get<double>();
            spec.upper = f.at("upper").get<double>();
            if (f.contains("levels")) {
                spec.levels = f.at("levels").get<std::vector<double>>();
            }
            features.push_back(std::move(spec));
        }
        Schema schema(std::move(features), j.at("target").get<std::string>());
        if (j.contains("constraints")) {
            schema.constraints_path = base_dir / j.at("constraints").get<std::string>();
        }
        return schema;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed schema: ") + e.what());
    }
}

inline nlohmann::json schema_to_json(const Schema& schema) {
    nlohmann::json features = nlohmann::json::array();
    for (const auto& f : schema.features()) {
        nlohmann::json o{{"name", f.name}, {"type", to_string(f.type)}, {"mutable", f.mutable_},
                         {"lower", f.lower}, {"upper", f.upper}};
        if (f.type == FeatureType::categorical) {
            o["levels"] = f.levels;
        }
        features.push_back(std::move(o));
    }
    return {{"features", features}, {"target", schema.target()}};
}

inline Schema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open schema file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("schema " + path.string() + ": " + e.what());
    }
    return schema_from_json(j, path.parent_path());
}

/// Min-max map between original units and the [0,1]^d attack space.
/// Features with lower == upper map to 0.
class Scaler {
public:
    explicit Scaler(const Schema& schema) {
        lower_.reserve(schema.size());
        range_.reserve(schema.size());
        for (const auto& f : schema.features()) {
            lower_.push_back(f.lower);
            range_.push_back(f.upper - f.lower);
        }
    }

    std::size_t size() const { return lower_.size(); }

    double scale(std::size_t i, double v) const {
        return range_[i] > 0.0 ? (v - lower_[i]) / range_[i] : 0.0;
    }
    double unscale(std::size_t i, double s) const { return lower_[i] + s * range_[i]; }

    /// d(original)/d(scaled) for feature i.
    double range(std::size_t i) const { return range_[i]; }

    std::vector<double> scale(std::span<const double> x) const {
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            out[i] = scale(i, x[i]);
        }
        return out;
    }

    std::vector<double> unscale(std::span<const double> s) const {
        std::vector<double> out(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            out[i] = unscale(i, s[i]);
        }
        return out;
    }

private:
    std::vector<double> lower_;
    std::vector<double> range_;
};

} // namespace tabadv

#endif
