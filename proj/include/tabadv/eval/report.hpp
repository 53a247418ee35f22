#ifndef TABADV_EVAL_REPORT_HPP
#define TABADV_EVAL_REPORT_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabadv/core/format.hpp"
#include "tabadv/eval/scenario.hpp"

namespace tabadv {

/// All seeds of one (model, scenario, attack) cell.
struct ReportCell {
    std::string model;
    std::vector<ScenarioRun> runs;
};

inline nlohmann::json summary_to_json(const Summary& s) {
    return {{"mean", s.mean}, {"stddev", s.stddev}, {"ci95", s.ci95}, {"n", s.n}};
}

inline nlohmann::json satisfaction_to_json(const std::optional<SatisfactionTable>& t) {
    if (!t) return nullptr;
    nlohmann::json rel = nlohmann::json::object();
    for (const auto& r : t->relations) rel[r.name] = r.rate;
    return {{"n", t->n}, {"relations", rel}, {"all_relations", t->all_relations}, {"bounds", t->bounds},
            {"types", t->types}};
}

inline nlohmann::json run_to_json(const ScenarioRun& r) {
    nlohmann::json stages = nlohmann::json::object();
    for (Stage s : {Stage::natural, Stage::cpgd, Stage::capgd, Stage::moeva, Stage::none}) {
        stages[to_string(s)] = r.stage_counts[stage_index(s)];
    }
    return {{"seed", r.seed},
            {"n_examples", r.n_examples},
            {"clean_accuracy", r.clean_accuracy},
            {"robust_accuracy", r.robust_accuracy},
            {"stage_counts", stages},
            {"constraint_satisfaction", satisfaction_to_json(r.satisfaction)},
            {"queries", r.queries},
            {"gradient_calls", r.gradient_calls},
            {"attacker_rows", r.attacker_rows},
            {"audit_failures", r.audit_failures}};
}

/// Deterministic report: no timings, so reruns are byte-identical.
inline nlohmann::json report_json(const nlohmann::json& resolved_config, const std::vector<ReportCell>& cells) {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& cell : cells) {
        if (cell.runs.empty()) continue;
        const auto agg = aggregate(cell.runs);
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& r : cell.runs) runs.push_back(run_to_json(r));
        results.push_back({{"model", cell.model},
                           {"scenario", cell.runs.front().scenario},
                           {"attack", to_string(cell.runs.front().attack)},
                           {"clean_accuracy", summary_to_json(agg.clean_accuracy)},
                           {"robust_accuracy", summary_to_json(agg.robust_accuracy)},
                           {"runs", runs}});
    }
    return {{"format", "tabadv-report/1"}, {"config", resolved_config}, {"results", results}};
}

/// One row per model x scenario x attack x seed.
inline std::string report_csv(const std::vector<ReportCell>& cells) {
    std::ostringstream out;
    out << "model,scenario,attack,seed,n_examples,clean_accuracy,robust_accuracy,natural,cpgd,capgd,moeva,none,"
           "relation_satisfaction,queries,gradient_calls\n";
    for (const auto& cell : cells) {
        for (const auto& r : cell.runs) {
            out << csv_escape(cell.model) << ',' << r.scenario << ',' << to_string(r.attack) << ',' << r.seed << ','
                << r.n_examples << ',' << format_double(r.clean_accuracy) << ',' << format_double(r.robust_accuracy);
            for (std::size_t c : r.stage_counts) out << ',' << c;
            out << ',' << (r.satisfaction ? format_double(r.satisfaction->all_relations) : "") << ',' << r.queries << ','
                << r.gradient_calls << '\n';
        }
    }
    return out.str();
}

/// Per-example log: accepting stage and the attempted stages' verdicts.
inline std::string outcomes_csv(const std::vector<ReportCell>& cells) {
    std::ostringstream out;
    out << "model,scenario,attack,seed,example,stage,attempted,queries,gradient_calls,diagnostic\n";
    for (const auto& cell : cells) {
        for (const auto& r : cell.runs) {
            for (std::size_t i = 0; i < r.cascade.entries.size(); ++i) {
                const auto& e = r.cascade.entries[i];
                std::string attempted, diag;
                std::uint64_t q = 0, g = 0;
                for (std::size_t k = 0; k < e.attempted.size(); ++k) {
                    const auto& o = e.outcomes[k];
                    attempted += (k ? ";" : "") + std::string(to_string(e.attempted[k])) + ":" +
                                 (o.success ? "success" : o.misclassified ? "misclassified" : "failed");
                    q += o.queries;
                    g += o.gradient_calls;
                    if (!o.diagnostic.empty()) diag += (diag.empty() ? "" : "; ") + o.diagnostic;
                }
                out << csv_escape(cell.model) << ',' << r.scenario << ',' << to_string(r.attack) << ',' << r.seed << ','
                    << i << ',' << to_string(e.stage) << ',' << csv_escape(attempted) << ',' << q << ',' << g << ','
                    << csv_escape(diag) << '\n';
            }
        }
    }
    return out.str();
}

/// Wall-clock figures, kept apart from the deterministic report.
inline nlohmann::json timing_json(const std::vector<ReportCell>& cells) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& cell : cells) {
        for (const auto& r : cell.runs) {
            out.push_back({{"model", cell.model},
                           {"scenario", r.scenario},
                           {"attack", to_string(r.attack)},
                           {"seed", r.seed},
                           {"wall_time", r.cascade.wall_time},
                           {"stage_time", {{"cpgd", r.cascade.stage_time[0]},
                                           {"capgd", r.cascade.stage_time[1]},
                                           {"moeva", r.cascade.stage_time[2]}}}});
        }
    }
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

} // namespace tabadv

#endif
