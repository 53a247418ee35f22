#ifndef TABADV_CLI_RUN_CONFIG_HPP
#define TABADV_CLI_RUN_CONFIG_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabadv/data/synthetic.hpp"
#include "tabadv/eval/scenario.hpp"

namespace tabadv {

namespace fs = std::filesystem;

/// Where the rows come from: a synthetic generator or CSV files.
struct DataSource {
    std::optional<fs::path> generator;
    std::uint64_t seed = 7;
    std::size_t eval_n = 200; ///< size of the held-out draw for a generator
    std::optional<fs::path> train_csv;
    std::optional<fs::path> eval_csv;
    std::optional<fs::path> reserve_csv; ///< same-distribution split for scenario E
};

/// Everything one experiment needs. Relative paths resolve against the
/// directory of the config file.
struct RunConfig {
    fs::path base_dir;
    fs::path schema;
    std::optional<fs::path> constraints; ///< overrides the schema's own constraints file
    DataSource data;
    std::vector<std::size_t> hidden{32, 32};
    TrainConfig training;
    std::optional<TrainConfig> robust_training; ///< trains the "robust" model when present
    std::map<std::string, fs::path> model_files;
    std::vector<std::string> models{"standard"};
    CaaConfig attacks;
    SurrogateConfig surrogate;
    std::vector<std::string> scenarios{"A1"};
    AttackKind attack = AttackKind::caa;
    std::vector<std::uint64_t> seeds{1};
    fs::path output = "out";
    std::size_t threads = 0; ///< 0: available parallelism

    void validate() const {
        if (!fs::exists(schema)) throw ConfigError("schema file not found: " + schema.string());
        if (constraints && !fs::exists(*constraints)) {
            throw ConfigError("constraints file not found: " + constraints->string());
        }
        for (const auto* p : {&data.generator, &data.train_csv, &data.eval_csv, &data.reserve_csv}) {
            if (*p && !fs::exists(**p)) throw ConfigError("data file not found: " + (*p)->string());
        }
        if (!data.generator && !(data.train_csv && data.eval_csv)) {
            throw ConfigError("dataset needs either 'generator' or both 'train_csv' and 'eval_csv'");
        }
        for (const auto& [name, path] : model_files) {
            if (!fs::exists(path)) throw ConfigError("model file for '" + name + "' not found: " + path.string());
        }
        for (const auto& id : scenarios) scenario(id);
        for (const auto& m : models) {
            if (m != "standard" && m != "robust" && !model_files.count(m)) {
                throw ConfigError("model '" + m + "' is neither trainable (standard, robust) nor given in model_files");
            }
            if (m == "robust" && !robust_training && !model_files.count(m)) {
                throw ConfigError("model 'robust' requested but no robust_training section given");
            }
        }
        if (seeds.empty()) throw ConfigError("seed list is empty");
        attacks.validate();
        training.validate();
        if (robust_training) robust_training->validate();
        for (const auto& id : scenarios) {
            const auto& spec = scenario(id);
            if (spec.model_access == AccessLevel::query_proba &&
                (attack == AttackKind::cpgd || attack == AttackKind::capgd)) {
                throw ConfigError(std::string("scenario ") + id + " only allows model queries; gradient attack '" +
                                  to_string(attack) + "' cannot run");
            }
        }
    }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
    }
}

inline TrainConfig train_from_json(const nlohmann::json& j, TrainConfig t, const std::string& where) {
    reject_unknown(j, {"epochs", "batch_size", "learning_rate", "momentum", "weight_decay", "adversarial",
                       "adv_epsilon", "adv_steps", "validation_fraction", "seed"},
                   where);
    t.epochs = j.value("epochs", t.epochs);
    t.batch_size = j.value("batch_size", t.batch_size);
    t.learning_rate = j.value("learning_rate", t.learning_rate);
    t.momentum = j.value("momentum", t.momentum);
    t.weight_decay = j.value("weight_decay", t.weight_decay);
    t.adversarial = j.value("adversarial", t.adversarial);
    t.adv_epsilon = j.value("adv_epsilon", t.adv_epsilon);
    t.adv_steps = j.value("adv_steps", t.adv_steps);
    t.validation_fraction = j.value("validation_fraction", t.validation_fraction);
    t.seed = j.value("seed", t.seed);
    return t;
}

inline nlohmann::json train_to_json(const TrainConfig& t) {
    return {{"epochs", t.epochs},           {"batch_size", t.batch_size},
            {"learning_rate", t.learning_rate}, {"momentum", t.momentum},
            {"weight_decay", t.weight_decay}, {"adversarial", t.adversarial},
            {"adv_epsilon", t.adv_epsilon},   {"adv_steps", t.adv_steps},
            {"validation_fraction", t.validation_fraction}, {"seed", t.seed}};
}

inline CaaConfig attacks_from_json(const nlohmann::json& j) {
    reject_unknown(j, {"epsilon", "cpgd", "capgd", "moeva"}, "attacks");
    CaaConfig c;
    c.set_epsilon(j.value("epsilon", c.epsilon()));
    if (j.contains("cpgd")) {
        const auto& s = j["cpgd"];
        reject_unknown(s, {"n_iter", "M"}, "attacks.cpgd");
        c.cpgd.n_iter = s.value("n_iter", c.cpgd.n_iter);
        c.cpgd.M = s.value("M", c.cpgd.M);
    }
    if (j.contains("capgd")) {
        const auto& s = j["capgd"];
        reject_unknown(s, {"n_iter", "alpha", "rho", "checkpoints"}, "attacks.capgd");
        c.capgd.n_iter = s.value("n_iter", c.capgd.n_iter);
        c.capgd.alpha = s.value("alpha", c.capgd.alpha);
        c.capgd.rho = s.value("rho", c.capgd.rho);
        c.capgd.checkpoints = s.value("checkpoints", c.capgd.checkpoints);
    }
    if (j.contains("moeva")) {
        const auto& s = j["moeva"];
        reject_unknown(s, {"n_generations", "population_size", "n_offspring", "crossover_rate", "mutation_rate",
                           "mutation_sigma", "init_sigma"},
                       "attacks.moeva");
        auto& m = c.moeva;
        m.n_generations = s.value("n_generations", m.n_generations);
        m.population_size = s.value("population_size", m.population_size);
        m.n_offspring = s.value("n_offspring", m.n_offspring);
        m.crossover_rate = s.value("crossover_rate", m.crossover_rate);
        m.mutation_rate = s.value("mutation_rate", m.mutation_rate);
        m.mutation_sigma = s.value("mutation_sigma", m.mutation_sigma);
        m.init_sigma = s.value("init_sigma", m.init_sigma);
    }
    return c;
}

inline nlohmann::json attacks_to_json(const CaaConfig& c) {
    return {{"epsilon", c.epsilon()},
            {"cpgd", {{"n_iter", c.cpgd.n_iter}, {"M", c.cpgd.M}}},
            {"capgd",
             {{"n_iter", c.capgd.n_iter},
              {"alpha", c.capgd.alpha},
              {"rho", c.capgd.rho},
              {"checkpoints", c.capgd.resolved_checkpoints()}}},
            {"moeva",
             {{"n_generations", c.moeva.n_generations},
              {"population_size", c.moeva.population_size},
              {"n_offspring", c.moeva.n_offspring},
              {"crossover_rate", c.moeva.crossover_rate},
              {"mutation_rate", c.moeva.mutation_rate},
              {"mutation_sigma", c.moeva.mutation_sigma},
              {"init_sigma", c.moeva.init_sigma}}}};
}

inline std::string rel(const fs::path& p, const fs::path& base) {
    const auto r = p.lexically_relative(base);
    return (r.empty() ? p : r).generic_string();
}

} // namespace detail

inline RunConfig run_config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
    detail::reject_unknown(j, {"schema", "constraints", "dataset", "model", "training", "robust_training", "models",
                               "attacks", "surrogate", "scenarios", "attack", "seeds", "output", "threads"},
                           "run config");
    RunConfig c;
    c.base_dir = base_dir;
    c.schema = base_dir / j.at("schema").get<std::string>();
    if (j.contains("constraints")) c.constraints = base_dir / j["constraints"].get<std::string>();
    const auto& d = j.at("dataset");
    detail::reject_unknown(d, {"generator", "seed", "eval_n", "train_csv", "eval_csv", "reserve_csv"}, "dataset");
    auto opt_path = [&](const char* key) -> std::optional<fs::path> {
        if (!d.contains(key)) return std::nullopt;
        return base_dir / d[key].get<std::string>();
    };
    c.data.generator = opt_path("generator");
    c.data.train_csv = opt_path("train_csv");
    c.data.eval_csv = opt_path("eval_csv");
    c.data.reserve_csv = opt_path("reserve_csv");
    c.data.seed = d.value("seed", c.data.seed);
    c.data.eval_n = d.value("eval_n", c.data.eval_n);
    if (j.contains("model")) {
        const auto& m = j["model"];
        detail::reject_unknown(m, {"hidden", "files"}, "model");
        c.hidden = m.value("hidden", c.hidden);
        if (m.contains("files")) {
            for (const auto& [name, p] : m["files"].items()) c.model_files[name] = base_dir / p.get<std::string>();
        }
    }
    if (j.contains("training")) c.training = detail::train_from_json(j["training"], c.training, "training");
    if (j.contains("robust_training")) {
        TrainConfig robust = c.training;
        robust.adversarial = true;
        c.robust_training = detail::train_from_json(j["robust_training"], robust, "robust_training");
        c.robust_training->adversarial = true;
    }
    c.models = j.value("models", c.models);
    if (j.contains("attacks")) c.attacks = detail::attacks_from_json(j["attacks"]);
    if (j.contains("surrogate")) {
        const auto& s = j["surrogate"];
        detail::reject_unknown(s, {"hidden", "training", "subset_fraction"}, "surrogate");
        c.surrogate.hidden = s.value("hidden", c.surrogate.hidden);
        c.surrogate.subset_fraction = s.value("subset_fraction", c.surrogate.subset_fraction);
        c.surrogate.train = c.training;
        if (s.contains("training")) c.surrogate.train = detail::train_from_json(s["training"], c.training, "surrogate.training");
    } else {
        c.surrogate.train = c.training;
    }
    c.scenarios = j.value("scenarios", c.scenarios);
    if (j.contains("attack")) c.attack = attack_kind_from_string(j["attack"].get<std::string>());
    c.seeds = j.value("seeds", c.seeds);
    if (j.contains("output")) c.output = base_dir / j["output"].get<std::string>();
    else c.output = base_dir / c.output;
    c.threads = j.value("threads", c.threads);
    return c;
}

inline RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    try {
        return run_config_from_json(j, path.parent_path());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
}

/// Resolved configuration as recorded in reports. Thread count and output
/// location are left out so reports do not depend on them.
inline nlohmann::json run_config_to_json(const RunConfig& c) {
    using detail::rel;
    nlohmann::json data = {{"seed", c.data.seed}, {"eval_n", c.data.eval_n}};
    if (c.data.generator) data["generator"] = rel(*c.data.generator, c.base_dir);
    if (c.data.train_csv) data["train_csv"] = rel(*c.data.train_csv, c.base_dir);
    if (c.data.eval_csv) data["eval_csv"] = rel(*c.data.eval_csv, c.base_dir);
    if (c.data.reserve_csv) data["reserve_csv"] = rel(*c.data.reserve_csv, c.base_dir);
    nlohmann::json files = nlohmann::json::object();
    for (const auto& [name, p] : c.model_files) files[name] = rel(p, c.base_dir);
    nlohmann::json j = {{"schema", rel(c.schema, c.base_dir)},
                        {"dataset", data},
                        {"model", {{"hidden", c.hidden}, {"files", files}}},
                        {"training", detail::train_to_json(c.training)},
                        {"models", c.models},
                        {"attacks", detail::attacks_to_json(c.attacks)},
                        {"surrogate",
                         {{"hidden", c.surrogate.hidden},
                          {"subset_fraction", c.surrogate.subset_fraction},
                          {"training", detail::train_to_json(c.surrogate.train)}}},
                        {"scenarios", c.scenarios},
                        {"attack", to_string(c.attack)},
                        {"seeds", c.seeds}};
    if (c.constraints) j["constraints"] = rel(*c.constraints, c.base_dir);
    if (c.robust_training) j["robust_training"] = detail::train_to_json(*c.robust_training);
    return j;
}

} // namespace tabadv

#endif
