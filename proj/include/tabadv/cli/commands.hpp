#ifndef TABADV_CLI_COMMANDS_HPP
#define TABADV_CLI_COMMANDS_HPP

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tabadv/cli/run_config.hpp"
#include "tabadv/constraints/parser.hpp"
#include "tabadv/eval/report.hpp"
#include "tabadv/model/serialize.hpp"

namespace tabadv {

enum ExitCode : int { exit_ok = 0, exit_invalid = 1, exit_config = 2 };

/// Flag values that replace the corresponding config entries.
struct CliOverrides {
    std::optional<std::vector<std::string>> scenarios;
    std::optional<std::string> attack;
    std::optional<double> epsilon;
    std::optional<std::vector<std::uint64_t>> seeds;
    std::optional<fs::path> out;
    std::optional<std::size_t> threads;
};

inline void apply_overrides(RunConfig& cfg, const CliOverrides& o) {
    if (o.scenarios) cfg.scenarios = *o.scenarios;
    if (o.attack) cfg.attack = attack_kind_from_string(*o.attack);
    if (o.epsilon) cfg.attacks.set_epsilon(*o.epsilon);
    if (o.seeds) cfg.seeds = *o.seeds;
    if (o.out) cfg.output = *o.out;
    if (o.threads) cfg.threads = *o.threads;
}

inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        std::uint64_t v = 0;
        const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || p != item.data() + item.size()) {
            throw ConfigError("invalid seed '" + item + "' in seed list");
        }
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

struct LoadedData {
    ConstraintSetPtr constraints;
    DatasetPtr train;
    DatasetPtr eval;
};

inline LoadedData load_data(const RunConfig& cfg) {
    const auto run_schema = load_schema(cfg.schema);
    LoadedData out;
    if (cfg.data.generator) {
        auto gen = std::make_shared<GeneratorConfig>(load_generator(*cfg.data.generator));
        if (schema_to_json(*gen->schema) != schema_to_json(run_schema)) {
            throw ConfigError("generator schema differs from " + cfg.schema.string());
        }
        if (cfg.constraints) {
            gen->constraints = std::make_shared<const ConstraintSet>(load_constraints(*cfg.constraints, gen->schema));
        }
        out.constraints = gen->constraints;
        auto train = generate_synthetic(gen, cfg.data.seed);
        auto eval_gen = std::make_shared<GeneratorConfig>(*gen);
        eval_gen->n = cfg.data.eval_n;
        const auto fresh = generate_synthetic(eval_gen, derive_seed(cfg.data.seed, 0, "eval"));
        const std::set<std::vector<double>> seen(train.rows.begin(), train.rows.end());
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < fresh.size(); ++i) {
            if (!seen.count(fresh.rows[i])) keep.push_back(i);
        }
        out.train = std::make_shared<const Dataset>(std::move(train));
        out.eval = std::make_shared<const Dataset>(fresh.subset(keep));
    } else {
        auto schema = std::make_shared<const Schema>(run_schema);
        if (cfg.constraints) {
            out.constraints = std::make_shared<const ConstraintSet>(load_constraints(*cfg.constraints, schema));
        } else if (schema->constraints_path) {
            out.constraints = std::make_shared<const ConstraintSet>(load_constraints(*schema->constraints_path, schema));
        } else {
            out.constraints = std::make_shared<const ConstraintSet>(schema);
        }
        auto train = read_dataset_csv(*cfg.data.train_csv, schema, out.constraints);
        if (cfg.data.reserve_csv) {
            train.reserve = std::make_shared<const Dataset>(read_dataset_csv(*cfg.data.reserve_csv, schema, out.constraints));
        }
        out.train = std::make_shared<const Dataset>(std::move(train));
        out.eval = std::make_shared<const Dataset>(read_dataset_csv(*cfg.data.eval_csv, schema, out.constraints));
    }
    if (out.eval->count(1) == 0) throw ConfigError("evaluation data has no positive-class rows to attack");
    return out;
}

inline std::vector<std::size_t> target_layer_sizes(const RunConfig& cfg, std::size_t d) {
    std::vector<std::size_t> sizes{d};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(2);
    return sizes;
}

inline TrainResult train_named_model(const RunConfig& cfg, const std::string& name, const Dataset& train_data) {
    const TrainConfig& tc = name == "robust" ? *cfg.robust_training : cfg.training;
    const auto init = MlpModel::he_uniform(target_layer_sizes(cfg, train_data.schema->size()), tc.seed);
    return train(init, train_data, tc);
}

/// Model from its file when configured, otherwise trained in-process.
inline std::shared_ptr<const MlpModel> obtain_model(const RunConfig& cfg, const std::string& name,
                                                    const Dataset& train_data) {
    if (auto it = cfg.model_files.find(name); it != cfg.model_files.end()) {
        auto m = std::make_shared<const MlpModel>(load_model(it->second));
        if (m->input_size() != train_data.schema->size()) {
            throw ConfigError("model file " + it->second.string() + " does not match the schema arity");
        }
        return m;
    }
    return std::make_shared<const MlpModel>(train_named_model(cfg, name, train_data).model);
}

/// Trains the standard model and, when configured, the robust one.
inline int cmd_train(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto data = load_data(cfg);
    fs::create_directories(cfg.output / "models");
    std::vector<std::string> names{"standard"};
    if (cfg.robust_training) names.push_back("robust");
    nlohmann::json report = {{"config", run_config_to_json(cfg)}, {"models", nlohmann::json::object()}};
    for (const auto& name : names) {
        const auto result = train_named_model(cfg, name, *data.train);
        const auto path = cfg.output / "models" / (name + ".json");
        save_model(path, result.model);
        const double eval_auc = auc(result.model, *data.eval);
        nlohmann::json val = nlohmann::json::array();
        for (double a : result.history.validation_auc) val.push_back(std::isfinite(a) ? nlohmann::json(a) : nullptr);
        report["models"][name] = {{"file", "models/" + name + ".json"},
                                  {"loss", result.history.loss},
                                  {"validation_auc", val},
                                  {"best_epoch", result.history.best_epoch},
                                  {"eval_auc", eval_auc}};
        log << name << ": eval AUC " << format_double(eval_auc) << ", best epoch " << result.history.best_epoch
            << ", written to " << path.string() << "\n";
    }
    write_text(cfg.output / "training_report.json", report.dump(2) + "\n");
    return exit_ok;
}

/// Runs every (model, scenario, seed) cell and writes the reports.
inline int cmd_attack(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto data = load_data(cfg);
    const std::size_t threads = cfg.threads == 0 ? default_threads() : cfg.threads;
    fs::create_directories(cfg.output / "candidates");
    std::vector<ReportCell> cells;
    std::size_t audit_failures = 0;
    for (const auto& model_name : cfg.models) {
        const auto target = obtain_model(cfg, model_name, *data.train);
        for (const auto& id : cfg.scenarios) {
            ScenarioConfig sc{cfg.attacks, cfg.attack, cfg.surrogate, threads};
            ReportCell cell{model_name, {}};
            for (auto seed : cfg.seeds) {
                auto run = run_scenario(scenario(id), target, data.train, data.eval, sc, seed);
                audit_failures += run.audit_failures.size();
                for (const auto& f : run.audit_failures) log << "audit: " << id << " seed " << seed << ": " << f << "\n";

                const AttackDomain domain(data.eval->constraints);
                std::vector<std::vector<double>> emitted, originals;
                for (std::size_t i = 0; i < run.examples.size(); ++i) {
                    if (run.cascade.entries[i].attempted.empty()) continue;
                    emitted.push_back(to_original(domain, run.examples[i], run.cascade.entries[i].adversarial));
                    originals.push_back(run.examples[i].original);
                }
                const auto stem = model_name + "_" + id + "_" + to_string(cfg.attack) + "_seed" + std::to_string(seed);
                write_dataset_csv(cfg.output / "candidates" / (stem + ".csv"), domain.schema(), emitted, nullptr);
                write_dataset_csv(cfg.output / "candidates" / (stem + "_originals.csv"), domain.schema(), originals,
                                  nullptr);
                log << model_name << " " << id << " " << to_string(cfg.attack) << " seed " << seed
                    << ": clean " << format_double(run.clean_accuracy) << ", robust "
                    << format_double(run.robust_accuracy) << "\n";
                cell.runs.push_back(std::move(run));
            }
            cells.push_back(std::move(cell));
        }
    }
    write_text(cfg.output / "report.json", report_json(run_config_to_json(cfg), cells).dump(2) + "\n");
    write_text(cfg.output / "report.csv", report_csv(cells));
    write_text(cfg.output / "outcomes.csv", outcomes_csv(cells));
    write_text(cfg.output / "timing.json", timing_json(cells).dump(2) + "\n");
    if (audit_failures > 0) {
        log << audit_failures << " success-flagged candidates failed the independent audit\n";
        return exit_invalid;
    }
    return exit_ok;
}

/// Standalone validity audit of a candidate file (original units).
inline int cmd_validate(const fs::path& candidates_csv, const fs::path& schema_path,
                        const std::optional<fs::path>& constraints_path, const std::optional<fs::path>& originals_csv,
                        std::ostream& log) {
    auto schema = std::make_shared<const Schema>(load_schema(schema_path));
    ConstraintSet set = constraints_path            ? load_constraints(*constraints_path, schema)
                        : schema->constraints_path ? load_constraints(*schema->constraints_path, schema)
                                                   : ConstraintSet(schema);
    const auto rows = read_feature_csv(candidates_csv, *schema);
    std::vector<std::vector<double>> originals = rows;
    if (originals_csv) {
        originals = read_feature_csv(*originals_csv, *schema);
        if (originals.size() != rows.size()) {
            throw ConfigError("originals file has " + std::to_string(originals.size()) + " rows, candidates " +
                              std::to_string(rows.size()));
        }
    }
    std::size_t invalid = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = check(rows[i], set, originals[i]);
        if (r.valid) continue;
        ++invalid;
        for (const auto& f : r.failures) log << "row " << i << ": " << f << "\n";
    }
    if (!rows.empty()) {
        const auto t = constraint_satisfaction_table(rows, originals, set);
        for (const auto& row : t.relations) log << "rate " << row.name << " " << format_double(row.rate) << "\n";
        log << "rate all_relations " << format_double(t.all_relations) << "\n";
        log << "rate bounds " << format_double(t.bounds) << "\n";
        log << "rate types " << format_double(t.types) << "\n";
    }
    log << invalid << " of " << rows.size() << " rows invalid\n";
    return invalid == 0 ? exit_ok : exit_invalid;
}

} // namespace tabadv

#endif
