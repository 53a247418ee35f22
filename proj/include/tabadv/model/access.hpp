#ifndef TABADV_MODEL_ACCESS_HPP
#define TABADV_MODEL_ACCESS_HPP

#include <atomic>
#include <memory>

#include "tabadv/model/mlp.hpp"

namespace tabadv {

/// What an attacker may ask of a model.
enum class AccessLevel {
    whitebox,    ///< probabilities and loss gradients
    query_proba, ///< probabilities only
    none,
};

inline const char* to_string(AccessLevel a) {
    switch (a) {
    case AccessLevel::whitebox: return "whitebox";
    case AccessLevel::query_proba: return "query_proba";
    case AccessLevel::none: return "none";
    }
    return "?";
}

/// Access-checked, call-counting view of a model. Copies share counters.
class ModelAccess {
public:
    ModelAccess(std::shared_ptr<const MlpModel> model, AccessLevel level)
        : model_(std::move(model)), level_(level), counts_(std::make_shared<Counts>()) {}

    AccessLevel level() const { return level_; }
    const MlpModel& model() const { return *model_; }
    const std::shared_ptr<const MlpModel>& model_ptr() const { return model_; }

    Probabilities probabilities(std::span<const double> x) const {
        if (level_ == AccessLevel::none) {
            throw AccessError("model cannot be queried at access level 'none'");
        }
        counts_->queries.fetch_add(1, std::memory_order_relaxed);
        return model_->forward(x);
    }

    LossAndGradient loss_gradient(std::span<const double> x, int y) const {
        if (level_ != AccessLevel::whitebox) {
            throw AccessError(std::string("loss gradients need whitebox access, have '") + to_string(level_) + "'");
        }
        counts_->gradients.fetch_add(1, std::memory_order_relaxed);
        return model_->loss_gradient(x, y);
    }

    std::uint64_t queries() const { return counts_->queries.load(); }
    std::uint64_t gradient_calls() const { return counts_->gradients.load(); }

    /// Same model, fresh counters, possibly lower access.
    ModelAccess restricted(AccessLevel level) const { return ModelAccess(model_, level); }

private:
    struct Counts {
        std::atomic<std::uint64_t> queries{0};
        std::atomic<std::uint64_t> gradients{0};
    };

    std::shared_ptr<const MlpModel> model_;
    AccessLevel level_;
    std::shared_ptr<Counts> counts_;
};

} // namespace tabadv

#endif
