#ifndef TABADV_MODEL_TRAIN_HPP
#define TABADV_MODEL_TRAIN_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tabadv/attacks/geometry.hpp"
#include "tabadv/data/dataset.hpp"
#include "tabadv/model/auc.hpp"
#include "tabadv/model/mlp.hpp"

namespace tabadv {

struct TrainConfig {
    std::size_t epochs = 60;
    std::size_t batch_size = 32;
    double learning_rate = 0.05;
    double momentum = 0.9;
    double weight_decay = 0.0;
    bool adversarial = false;
    double adv_epsilon = 4.0 / 255.0; ///< L2 radius in scaled units
    std::size_t adv_steps = 10;
    double validation_fraction = 0.2;
    std::uint64_t seed = 0;

    void validate() const {
        if (batch_size < 1) throw ConfigError("training: batch_size must be at least 1");
        if (!(learning_rate > 0.0)) throw ConfigError("training: learning_rate must be positive");
        if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("training: momentum must lie in [0, 1)");
        if (!(weight_decay >= 0.0)) throw ConfigError("training: weight_decay must be non-negative");
        if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
            throw ConfigError("training: validation_fraction must lie in [0, 1)");
        }
        if (adversarial && (!(adv_epsilon > 0.0) || adv_steps < 1)) {
            throw ConfigError("training: adversarial mode needs adv_epsilon > 0 and adv_steps >= 1");
        }
    }
};

struct TrainHistory {
    std::vector<double> loss;           ///< mean training loss per epoch
    std::vector<double> validation_auc; ///< NaN when the split lacks a class
    std::size_t best_epoch = 0;         ///< 1-based; 0 means the initial weights were kept
};

struct TrainResult {
    MlpModel model;
    TrainHistory history;
};

inline std::vector<std::vector<double>> scaled_rows(const Dataset& data) {
    const Scaler scaler(*data.schema);
    std::vector<std::vector<double>> out;
    out.reserve(data.size());
    for (const auto& r : data.rows) out.push_back(scaler.scale(r));
    return out;
}

inline double auc(const MlpModel& model, const std::vector<std::vector<double>>& scaled, const std::vector<int>& labels) {
    std::vector<double> scores;
    scores.reserve(scaled.size());
    for (const auto& x : scaled) scores.push_back(model.forward(x)[1]);
    return auc(scores, labels);
}

inline double auc(const MlpModel& model, const Dataset& data) { return auc(model, scaled_rows(data), data.labels); }

/// L2 PGD around x with bounds clipping only; no mask and no relation terms.
inline std::vector<double> madry_example(const MlpModel& model, std::span<const double> x, int y, double epsilon,
                                         std::size_t steps) {
    const std::vector<bool> all(x.size(), true);
    const double step = 2.0 * epsilon / static_cast<double>(steps);
    std::vector<double> adv(x.begin(), x.end());
    for (std::size_t k = 0; k < steps; ++k) {
        const auto dir = scaled_sign(model.loss_gradient(adv, y).grad, all);
        for (std::size_t i = 0; i < adv.size(); ++i) adv[i] += step * dir[i];
        adv = project(x, adv, epsilon, all);
    }
    return adv;
}

/// Minibatch SGD with momentum on cross-entropy. The weights with the best
/// validation AUC are returned, ties going to the lower validation loss (the
/// last epoch when no split is available).
inline TrainResult train(const MlpModel& init, const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    if (data.size() == 0) throw ConfigError("training needs a non-empty dataset");
    if (init.input_size() != data.schema->size()) throw ConfigError("model input size does not match the schema");
    TrainResult result{init, {}};
    if (cfg.epochs == 0) return result;

    const auto xs = scaled_rows(data);
    Rng rng(derive_seed(cfg.seed, 0, "train"));

    std::vector<std::size_t> fit, val;
    for (int c = 0; c < 2; ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.labels[i] == c) idx.push_back(i);
        }
        rng.shuffle(idx);
        const auto n_val = static_cast<std::size_t>(std::round(cfg.validation_fraction * static_cast<double>(idx.size())));
        val.insert(val.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
        fit.insert(fit.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
    }
    std::sort(val.begin(), val.end());
    std::sort(fit.begin(), fit.end());
    if (fit.empty()) throw ConfigError("training split left no rows to fit");
    std::vector<std::vector<double>> val_x;
    std::vector<int> val_y;
    for (std::size_t i : val) {
        val_x.push_back(xs[i]);
        val_y.push_back(data.labels[i]);
    }
    const bool can_validate = std::count(val_y.begin(), val_y.end(), 1) > 0 && std::count(val_y.begin(), val_y.end(), 0) > 0;

    MlpModel model = init;
    auto velocity = model.zero_gradient();
    double best_auc = -1.0;
    double best_loss = std::numeric_limits<double>::infinity();
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(fit);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < fit.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(fit.size(), start + cfg.batch_size);
            auto grad = model.zero_gradient();
            for (std::size_t b = start; b < end; ++b) {
                const std::size_t i = fit[b];
                const int y = data.labels[i];
                if (cfg.adversarial) {
                    const auto adv = madry_example(model, xs[i], y, cfg.adv_epsilon, cfg.adv_steps);
                    loss_sum += model.accumulate_parameter_gradient(adv, y, grad);
                } else {
                    loss_sum += model.accumulate_parameter_gradient(xs[i], y, grad);
                }
            }
            if (!std::isfinite(loss_sum)) {
                throw TrainingError("training diverged: non-finite loss in epoch " + std::to_string(epoch));
            }
            const double scale = 1.0 / static_cast<double>(end - start);
            auto& layers = model.layers();
            for (std::size_t l = 0; l < layers.size(); ++l) {
                auto& L = layers[l];
                for (std::size_t k = 0; k < L.weights.size(); ++k) {
                    const double g = grad.weights[l][k] * scale + cfg.weight_decay * L.weights[k];
                    velocity.weights[l][k] = cfg.momentum * velocity.weights[l][k] - cfg.learning_rate * g;
                    L.weights[k] += velocity.weights[l][k];
                }
                for (std::size_t k = 0; k < L.bias.size(); ++k) {
                    velocity.bias[l][k] = cfg.momentum * velocity.bias[l][k] - cfg.learning_rate * grad.bias[l][k] * scale;
                    L.bias[k] += velocity.bias[l][k];
                }
            }
        }
        result.history.loss.push_back(loss_sum / static_cast<double>(fit.size()));
        if (can_validate) {
            const double a = auc(model, val_x, val_y);
            double l = 0.0;
            for (std::size_t i = 0; i < val_x.size(); ++i) l += model.loss(val_x[i], val_y[i]);
            result.history.validation_auc.push_back(a);
            if (a > best_auc || (a == best_auc && l < best_loss)) {
                best_auc = a;
                best_loss = l;
                result.model = model;
                result.history.best_epoch = epoch;
            }
        } else {
            result.history.validation_auc.push_back(std::numeric_limits<double>::quiet_NaN());
            result.model = model;
            result.history.best_epoch = epoch;
        }
    }
    result.model.fingerprint = std::string(cfg.adversarial ? "madry" : "standard") + ":seed=" +
                               std::to_string(cfg.seed) + ":epochs=" + std::to_string(cfg.epochs) +
                               ":best=" + std::to_string(result.history.best_epoch);
    return result;
}

} // namespace tabadv

#endif
