#ifndef TABADV_ATTACKS_CAPGD_HPP
#define TABADV_ATTACKS_CAPGD_HPP

#include <cmath>

#include "tabadv/attacks/domain.hpp"

namespace tabadv {

/// Iterations at which the step size may be halved: p0 = 0, p1 = 0.22,
/// p(j+1) = p(j) + max(p(j) - p(j-1) - 0.03, 0.06), w(j) = ceil(p(j) * n_iter).
inline std::vector<std::size_t> default_checkpoints(std::size_t n_iter) {
    std::vector<double> p{0.0, 0.22};
    while (p.back() < 1.0) {
        const double next = p.back() + std::max(p.back() - p[p.size() - 2] - 0.03, 0.06);
        p.push_back(next);
    }
    std::vector<std::size_t> w;
    for (double pj : p) {
        // The small offset keeps values like 7.000000000000001 at 7.
        const auto wj = static_cast<std::size_t>(std::ceil(pj * static_cast<double>(n_iter) - 1e-9));
        if (wj > n_iter) break;
        if (w.empty() || wj > w.back()) w.push_back(wj);
    }
    return w;
}

struct CapgdConfig {
    double epsilon = 0.5;
    std::size_t n_iter = 10;
    double alpha = 0.75; ///< weight of the new step against the previous update
    double rho = 0.75;
    std::vector<std::size_t> checkpoints; ///< empty: default_checkpoints(n_iter)
    bool enforce_constraints = true;

    std::vector<std::size_t> resolved_checkpoints() const {
        return checkpoints.empty() ? default_checkpoints(n_iter) : checkpoints;
    }

    void validate() const {
        if (!(epsilon > 0.0)) throw ConfigError("capgd: epsilon must be positive");
        if (n_iter < 1) throw ConfigError("capgd: n_iter must be at least 1");
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("capgd: alpha must lie in [0, 1]");
        if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("capgd: rho must lie in (0, 1)");
        const auto w = resolved_checkpoints();
        if (w.empty() || w.front() != 0) throw ConfigError("capgd: first checkpoint must be 0");
        for (std::size_t j = 1; j < w.size(); ++j) {
            if (w[j] <= w[j - 1]) throw ConfigError("capgd: checkpoints must be strictly increasing");
        }
        if (w.back() > n_iter) throw ConfigError("capgd: checkpoints cannot exceed n_iter");
    }
};

inline double capgd_initial_step(const CapgdConfig& cfg) { return 2.0 * cfg.epsilon; }

/// Per-iteration record, for audits.
struct CapgdTrace {
    std::vector<std::vector<double>> iterates; ///< x(0) .. x(n_iter), before any restart
    std::vector<double> objectives;
    std::vector<double> step_sizes;            ///< eta used to produce iterate k+1
};

/// Constrained APGD: momentum on the projected step, step halving at
/// checkpoints, restart from the best iterate. Returns the best iterate.
inline AttackOutcome capgd(const AttackDomain& domain, const ModelAccess& model, const Example& ex,
                           const CapgdConfig& cfg, CapgdTrace* trace = nullptr) {
    cfg.validate();
    const auto checkpoints = cfg.resolved_checkpoints();
    Stopwatch clock;
    AttackOutcome out;
    const bool enforce = cfg.enforce_constraints;

    std::vector<double> x = ex.scaled;
    std::vector<double> x_prev = x;
    std::vector<double> x_best = x;
    try {
        auto obj = attack_objective(domain, model, ex, x, enforce);
        ++out.gradient_calls;
        if (!std::isfinite(obj.value) || !all_finite(obj.grad)) {
            throw EvaluationError("non-finite gradient at the clean input");
        }
        ObjectiveValue best = obj;
        double eta = capgd_initial_step(cfg);
        double f_prev = obj.value;
        std::size_t increases = 0;
        std::size_t next_cp = 1;
        bool reduced_last = false;
        double best_at_last_cp = best.value;
        if (trace) {
            trace->iterates.push_back(x);
            trace->objectives.push_back(obj.value);
        }

        for (std::size_t k = 0; k < cfg.n_iter; ++k) {
            const auto dir = scaled_sign(obj.grad, domain.mask());
            std::vector<double> z(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + eta * dir[i];
            z = project(ex.scaled, z, cfg.epsilon, domain.mask());
            std::vector<double> m(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                m[i] = x[i] + cfg.alpha * (z[i] - x[i]) + (1.0 - cfg.alpha) * (x[i] - x_prev[i]);
            }
            if (trace) trace->step_sizes.push_back(eta);
            x_prev = std::move(x);
            x = project_and_repair(domain, ex, m, cfg.epsilon, enforce);

            obj = attack_objective(domain, model, ex, x, enforce);
            ++out.gradient_calls;
            if (!std::isfinite(obj.value) || !all_finite(obj.grad)) {
                out.diagnostic = "non-finite gradient at iteration " + std::to_string(k + 1);
                break;
            }
            if (obj.value > f_prev) ++increases;
            f_prev = obj.value;
            if (obj.value > best.value) {
                best = obj;
                x_best = x;
            }
            if (trace) {
                trace->iterates.push_back(x);
                trace->objectives.push_back(obj.value);
            }

            if (next_cp < checkpoints.size() && k + 1 == checkpoints[next_cp]) {
                const auto span = static_cast<double>(checkpoints[next_cp] - checkpoints[next_cp - 1]);
                const bool too_few_increases = static_cast<double>(increases) < cfg.rho * span;
                const bool stalled = !reduced_last && best.value == best_at_last_cp;
                reduced_last = too_few_increases || stalled;
                if (reduced_last) {
                    eta /= 2.0;
                    x = x_best;
                    x_prev = x_best;
                    obj = best;
                    f_prev = best.value;
                }
                best_at_last_cp = best.value;
                increases = 0;
                ++next_cp;
            }
        }
    } catch (const EvaluationError& e) {
        out.diagnostic = e.what();
    }
    out.candidate = x_best;
    const auto p = model.probabilities(x_best);
    ++out.queries;
    record(out, assess(domain, ex, x_best, cfg.epsilon, p));
    out.wall_time = clock.seconds();
    return out;
}

} // namespace tabadv

#endif
