// Command-line front end: train, attack, validate.
#include <iostream>

#include <CLI11.hpp>

#include "tabadv/cli/commands.hpp"

namespace {

int run(int argc, char** argv) {
    using namespace tabadv;
    CLI::App app{"Constrained adversarial attacks on tabular classifiers"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> scenarios;
    std::string attack, seeds, out;
    double epsilon = 0.0;
    std::size_t threads = 0;

    auto* train_cmd = app.add_subcommand("train", "train the standard and robust models of a run config");
    train_cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
    train_cmd->add_option("--out", out, "output directory");

    auto* attack_cmd = app.add_subcommand("attack", "run scenarios and write reports");
    attack_cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
    auto* scen_opt = attack_cmd->add_option("--scenario", scenarios, "scenario ids (A1..E2)")->delimiter(',');
    auto* attack_opt = attack_cmd->add_option("--attack", attack, "cpgd, capgd, moeva or caa")
                           ->check(CLI::IsMember({"cpgd", "capgd", "moeva", "caa"}));
    auto* eps_opt = attack_cmd->add_option("--epsilon", epsilon, "L2 budget in scaled units");
    auto* seeds_opt = attack_cmd->add_option("--seeds", seeds, "comma-separated seed list");
    attack_cmd->add_option("--out", out, "output directory");
    auto* threads_opt = attack_cmd->add_option("--threads", threads, "worker threads (default: all cores)");

    std::string candidates, schema, constraints, originals;
    auto* validate_cmd = app.add_subcommand("validate", "audit a candidate CSV against schema and constraints");
    validate_cmd->add_option("--candidates", candidates, "candidate rows (CSV, original units)")->required();
    validate_cmd->add_option("--schema", schema, "schema file (JSON)")->required();
    auto* cons_opt = validate_cmd->add_option("--constraints", constraints, "constraint file (defaults to the schema's)");
    auto* orig_opt = validate_cmd->add_option("--originals", originals, "clean rows the candidates came from");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*validate_cmd) {
            return cmd_validate(candidates, schema, *cons_opt ? std::optional<fs::path>(constraints) : std::nullopt,
                                *orig_opt ? std::optional<fs::path>(originals) : std::nullopt, std::cout);
        }
        auto cfg = load_run_config(config_path);
        CliOverrides o;
        if (!out.empty()) o.out = out;
        if (*train_cmd) {
            apply_overrides(cfg, o);
            return cmd_train(cfg, std::cout);
        }
        if (*scen_opt) o.scenarios = scenarios;
        if (*attack_opt) o.attack = attack;
        if (*eps_opt) o.epsilon = epsilon;
        if (*seeds_opt) o.seeds = parse_seed_list(seeds);
        if (*threads_opt) o.threads = threads;
        apply_overrides(cfg, o);
        return cmd_attack(cfg, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const ParseError& e) {
        std::cerr << "constraint syntax error: " << e.what() << "\n";
        return exit_config;
    } catch (const AccessError& e) {
        std::cerr << "access error: " << e.what() << "\n";
        return exit_config;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invalid;
    }
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
