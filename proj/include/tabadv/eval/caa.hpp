#ifndef TABADV_EVAL_CAA_HPP
#define TABADV_EVAL_CAA_HPP

#include <array>
#include <mutex>
#include <string>
#include <vector>

#include "tabadv/attacks/capgd.hpp"
#include "tabadv/attacks/cpgd.hpp"
#include "tabadv/attacks/moeva.hpp"
#include "tabadv/core/parallel.hpp"

namespace tabadv {

enum class Stage { natural, cpgd, capgd, moeva, none };

inline const char* to_string(Stage s) {
    switch (s) {
    case Stage::natural: return "natural";
    case Stage::cpgd: return "cpgd";
    case Stage::capgd: return "capgd";
    case Stage::moeva: return "moeva";
    case Stage::none: return "none";
    }
    return "?";
}

inline constexpr std::array<Stage, 3> attack_stages{Stage::cpgd, Stage::capgd, Stage::moeva};

inline bool needs_gradients(Stage s) { return s == Stage::cpgd || s == Stage::capgd; }

/// Which attack the user asked for; caa is the full cascade.
enum class AttackKind { cpgd, capgd, moeva, caa };

inline const char* to_string(AttackKind a) {
    switch (a) {
    case AttackKind::cpgd: return "cpgd";
    case AttackKind::capgd: return "capgd";
    case AttackKind::moeva: return "moeva";
    case AttackKind::caa: return "caa";
    }
    return "?";
}

inline AttackKind attack_kind_from_string(const std::string& s) {
    if (s == "cpgd") return AttackKind::cpgd;
    if (s == "capgd") return AttackKind::capgd;
    if (s == "moeva") return AttackKind::moeva;
    if (s == "caa") return AttackKind::caa;
    throw ConfigError("unknown attack '" + s + "' (expected cpgd, capgd, moeva or caa)");
}

inline std::vector<Stage> stages_of(AttackKind a) {
    switch (a) {
    case AttackKind::cpgd: return {Stage::cpgd};
    case AttackKind::capgd: return {Stage::capgd};
    case AttackKind::moeva: return {Stage::moeva};
    case AttackKind::caa: return {Stage::cpgd, Stage::capgd, Stage::moeva};
    }
    return {};
}

struct CaaConfig {
    CpgdConfig cpgd;
    CapgdConfig capgd;
    MoevaConfig moeva;

    double epsilon() const { return cpgd.epsilon; }
    bool enforce_constraints() const { return cpgd.enforce_constraints; }

    void set_epsilon(double eps) { cpgd.epsilon = capgd.epsilon = moeva.epsilon = eps; }
    void set_enforce(bool on) { cpgd.enforce_constraints = capgd.enforce_constraints = moeva.enforce_constraints = on; }

    void validate() const {
        cpgd.validate();
        capgd.validate();
        moeva.validate();
        if (cpgd.epsilon != capgd.epsilon || cpgd.epsilon != moeva.epsilon) {
            throw ConfigError("cascade stages must share the same epsilon");
        }
        if (cpgd.enforce_constraints != capgd.enforce_constraints ||
            cpgd.enforce_constraints != moeva.enforce_constraints) {
            throw ConfigError("cascade stages must agree on enforce_constraints");
        }
    }
};

/// Stages that can actually run at this access level. Gradient stages are
/// skipped under query-only access; nothing runs without access.
inline std::vector<Stage> runnable_stages(const std::vector<Stage>& requested, AccessLevel level) {
    if (level == AccessLevel::none) throw AccessError("attacks need at least query access to the model");
    std::vector<Stage> out;
    for (Stage s : requested) {
        if (needs_gradients(s) && level != AccessLevel::whitebox) continue;
        out.push_back(s);
    }
    if (out.empty()) {
        throw AccessError(std::string("requested gradient attack needs whitebox access, have '") + to_string(level) + "'");
    }
    return out;
}

struct CascadeEntry {
    std::vector<double> adversarial; ///< scaled; the clean input unless a stage was accepted
    Stage stage = Stage::none;       ///< accepting stage, natural, or none
    std::vector<Stage> attempted;
    std::vector<AttackOutcome> outcomes; ///< one per attempted stage
    bool success() const { return stage != Stage::none; }
};

struct CascadeResult {
    std::vector<CascadeEntry> entries;
    std::array<double, 3> stage_time{}; ///< summed per-example seconds for cpgd, capgd, moeva
    double wall_time = 0.0;             ///< batch wall clock

    std::size_t count(Stage s) const {
        return static_cast<std::size_t>(
            std::count_if(entries.begin(), entries.end(), [s](const auto& e) { return e.stage == s; }));
    }
    std::vector<std::vector<double>> adversarial() const {
        std::vector<std::vector<double>> out;
        for (const auto& e : entries) out.push_back(e.adversarial);
        return out;
    }
};

inline std::size_t stage_slot(Stage s) {
    return s == Stage::cpgd ? 0 : s == Stage::capgd ? 1 : 2;
}

inline AttackOutcome run_stage(Stage s, const AttackDomain& domain, const ModelAccess& model, const Example& ex,
                               const CaaConfig& cfg) {
    switch (s) {
    case Stage::cpgd: return cpgd(domain, model, ex, cfg.cpgd);
    case Stage::capgd: return capgd(domain, model, ex, cfg.capgd);
    case Stage::moeva: return moeva(domain, model, ex, cfg.moeva);
    default: throw ConfigError("not an attack stage");
    }
}

/// One example through the cascade. A stage's candidate is accepted when it
/// is misclassified, within budget and valid for every constraint the
/// attacker knows; later stages run only if no earlier one was accepted.
inline CascadeEntry cascade_example(const AttackDomain& domain, const ModelAccess& model, const Example& ex,
                                    const CaaConfig& cfg, const std::vector<Stage>& stages) {
    CascadeEntry entry;
    entry.adversarial = ex.scaled;
    const bool relations = cfg.enforce_constraints();
    if (predicted_class(model.probabilities(ex.scaled)) != ex.label &&
        attacker_valid(domain, ex, ex.scaled, relations)) {
        entry.stage = Stage::natural;
        return entry;
    }
    for (Stage s : stages) {
        entry.attempted.push_back(s);
        entry.outcomes.push_back(run_stage(s, domain, model, ex, cfg));
        const auto& out = entry.outcomes.back();
        if (out.diagnostic.empty() && out.misclassified && out.within_budget &&
            attacker_valid(domain, ex, out.candidate, relations)) {
            entry.adversarial = out.candidate;
            entry.stage = s;
            break;
        }
    }
    return entry;
}

/// Runs the requested stages over a batch. Examples are independent and
/// seeded by their index, so the result does not depend on `threads`.
inline CascadeResult caa(const AttackDomain& domain, const ModelAccess& model, const std::vector<Example>& examples,
                         const CaaConfig& cfg, const std::vector<Stage>& requested, std::size_t threads) {
    cfg.validate();
    const auto stages = runnable_stages(requested, model.level());
    CascadeResult result;
    result.entries.resize(examples.size());
    Stopwatch clock;
    parallel_for(examples.size(), threads, [&](std::size_t i) {
        result.entries[i] = cascade_example(domain, model, examples[i], cfg, stages);
    });
    result.wall_time = clock.seconds();
    for (const auto& e : result.entries) {
        for (std::size_t k = 0; k < e.attempted.size(); ++k) {
            result.stage_time[stage_slot(e.attempted[k])] += e.outcomes[k].wall_time;
        }
    }
    return result;
}

inline CascadeResult caa(const AttackDomain& domain, const ModelAccess& model, const std::vector<Example>& examples,
                         const CaaConfig& cfg, std::size_t threads = 1) {
    return caa(domain, model, examples, cfg, stages_of(AttackKind::caa), threads);
}

} // namespace tabadv

#endif
