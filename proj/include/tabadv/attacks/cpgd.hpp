#ifndef TABADV_ATTACKS_CPGD_HPP
#define TABADV_ATTACKS_CPGD_HPP

#include <cmath>

#include "tabadv/attacks/domain.hpp"

namespace tabadv {

struct CpgdConfig {
    double epsilon = 0.5;      ///< L2 budget in scaled units
    std::size_t n_iter = 10;
    std::size_t M = 7;         ///< controls the lower bound of the step schedule
    bool enforce_constraints = true;

    void validate() const {
        if (!(epsilon > 0.0)) throw ConfigError("cpgd: epsilon must be positive");
        if (n_iter < 1) throw ConfigError("cpgd: n_iter must be at least 1");
        if (M < 1 || M > n_iter) throw ConfigError("cpgd: M must lie in [1, n_iter]");
    }
};

/// eta(k) = epsilon * 10^-(1 + floor(k / floor(n_iter / M))).
inline double cpgd_step_size(const CpgdConfig& cfg, std::size_t k) {
    const std::size_t period = cfg.n_iter / cfg.M;
    const auto exponent = 1.0 + static_cast<double>(k / period);
    return cfg.epsilon * std::pow(10.0, -exponent);
}

/// Constrained PGD: ascend loss - g along the masked L2 sign, project onto
/// the budget, repair. Returns the last iterate.
inline AttackOutcome cpgd(const AttackDomain& domain, const ModelAccess& model, const Example& ex,
                          const CpgdConfig& cfg) {
    cfg.validate();
    Stopwatch clock;
    AttackOutcome out;
    std::vector<double> x = ex.scaled;
    try {
        for (std::size_t k = 0; k < cfg.n_iter; ++k) {
            const auto obj = attack_objective(domain, model, ex, x, cfg.enforce_constraints);
            ++out.gradient_calls;
            if (!std::isfinite(obj.value) || !all_finite(obj.grad)) {
                out.diagnostic = "non-finite gradient at iteration " + std::to_string(k);
                break;
            }
            const auto dir = scaled_sign(obj.grad, domain.mask());
            const double eta = cpgd_step_size(cfg, k);
            std::vector<double> z(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + eta * dir[i];
            x = project_and_repair(domain, ex, z, cfg.epsilon, cfg.enforce_constraints);
        }
    } catch (const EvaluationError& e) {
        out.diagnostic = e.what();
    }
    out.candidate = x;
    const auto p = model.probabilities(x);
    ++out.queries;
    record(out, assess(domain, ex, x, cfg.epsilon, p));
    out.wall_time = clock.seconds();
    return out;
}

} // namespace tabadv

#endif
