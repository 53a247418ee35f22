#ifndef TABADV_MODEL_MLP_HPP
#define TABADV_MODEL_MLP_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tabadv/core/error.hpp"
#include "tabadv/core/random.hpp"

namespace tabadv {

/// Dense layer, weights stored row-major (out x in).
struct DenseLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    double& w(std::size_t o, std::size_t i) { return weights[o * in + i]; }
    double w(std::size_t o, std::size_t i) const { return weights[o * in + i]; }
};

using Probabilities = std::array<double, 2>;

struct LossAndGradient {
    double loss = 0.0;
    std::vector<double> grad; ///< d loss / d input
};

/// Gradients of the loss with respect to every parameter, same shapes as the layers.
struct ParameterGradient {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> bias;
};

/// Feedforward binary classifier: ReLU hidden layers, two softmax outputs.
/// Inputs are scaled feature vectors. Loss is the cross-entropy -log p_y.
class MlpModel {
public:
    MlpModel() = default;

    explicit MlpModel(std::vector<DenseLayer> layers, std::uint64_t seed = 0) : layers_(std::move(layers)), seed_(seed) {
        if (layers_.empty()) {
            throw ConfigError("model needs at least one layer");
        }
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const auto& L = layers_[l];
            if (L.weights.size() != L.in * L.out || L.bias.size() != L.out || L.in == 0) {
                throw ConfigError("layer " + std::to_string(l) + " has inconsistent shapes");
            }
            if (l > 0 && layers_[l - 1].out != L.in) {
                throw ConfigError("layer " + std::to_string(l) + " input does not match previous output");
            }
        }
        if (layers_.back().out != 2) {
            throw ConfigError("binary classifier needs 2 outputs");
        }
    }

    /// He-uniform weights U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases.
    static MlpModel he_uniform(const std::vector<std::size_t>& sizes, std::uint64_t seed) {
        auto layers = shaped(sizes);
        Rng rng(derive_seed(seed, 0, "mlp-init"));
        for (auto& L : layers) {
            const double limit = std::sqrt(6.0 / static_cast<double>(L.in));
            for (double& w : L.weights) w = rng.uniform(-limit, limit);
        }
        return MlpModel(std::move(layers), seed);
    }

    static MlpModel zeros(const std::vector<std::size_t>& sizes) { return MlpModel(shaped(sizes), 0); }

    std::size_t input_size() const { return layers_.front().in; }
    std::vector<std::size_t> layer_sizes() const {
        std::vector<std::size_t> s{layers_.front().in};
        for (const auto& L : layers_) s.push_back(L.out);
        return s;
    }
    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }
    std::uint64_t seed() const { return seed_; }

    std::string fingerprint; ///< identifies how the parameters were produced

    Probabilities forward(std::span<const double> x) const {
        check_arity(x);
        std::vector<double> a(x.begin(), x.end());
        std::vector<double> z;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            affine(layers_[l], a, z);
            if (l + 1 < layers_.size()) {
                for (double& v : z) v = std::max(0.0, v);
            }
            a.swap(z);
        }
        return softmax(a[0], a[1]);
    }

    /// Predicted class; ties go to class 0.
    int predict(std::span<const double> x) const {
        const auto p = forward(x);
        return p[1] > p[0] ? 1 : 0;
    }

    /// Cross-entropy of the true class y.
    double loss(std::span<const double> x, int y) const { return loss_from_logits(run(x), y); }

    LossAndGradient loss_gradient(std::span<const double> x, int y) const {
        Trace t = run(x);
        LossAndGradient out;
        out.loss = loss_from_logits(t, y);
        std::vector<double> delta = output_delta(t, y);
        for (std::size_t l = layers_.size(); l-- > 0;) {
            delta = pull_back(l, t, delta);
        }
        out.grad = std::move(delta);
        return out;
    }

    /// Adds d loss / d parameters into g (shaped like the layers); returns the loss.
    double accumulate_parameter_gradient(std::span<const double> x, int y, ParameterGradient& g) const {
        Trace t = run(x);
        const double loss = loss_from_logits(t, y);
        std::vector<double> delta = output_delta(t, y);
        for (std::size_t l = layers_.size(); l-- > 0;) {
            const auto& L = layers_[l];
            const auto& input = t.activations[l];
            for (std::size_t o = 0; o < L.out; ++o) {
                g.bias[l][o] += delta[o];
                double* row = &g.weights[l][o * L.in];
                for (std::size_t i = 0; i < L.in; ++i) row[i] += delta[o] * input[i];
            }
            if (l > 0) delta = pull_back(l, t, delta);
        }
        return loss;
    }

    ParameterGradient zero_gradient() const {
        ParameterGradient g;
        for (const auto& L : layers_) {
            g.weights.emplace_back(L.weights.size(), 0.0);
            g.bias.emplace_back(L.bias.size(), 0.0);
        }
        return g;
    }

private:
    struct Trace {
        std::vector<std::vector<double>> activations; ///< input of each layer
        std::vector<std::vector<double>> preacts;     ///< output of each layer before ReLU
    };

    static std::vector<DenseLayer> shaped(const std::vector<std::size_t>& sizes) {
        if (sizes.size() < 2) {
            throw ConfigError("layer sizes need an input and an output");
        }
        std::vector<DenseLayer> layers;
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
            DenseLayer L;
            L.in = sizes[l];
            L.out = sizes[l + 1];
            L.weights.assign(L.in * L.out, 0.0);
            L.bias.assign(L.out, 0.0);
            layers.push_back(std::move(L));
        }
        return layers;
    }

    void check_arity(std::span<const double> x) const {
        if (x.size() != input_size()) {
            throw ConfigError("model expects " + std::to_string(input_size()) + " features, got " +
                              std::to_string(x.size()));
        }
    }

    static void affine(const DenseLayer& L, const std::vector<double>& a, std::vector<double>& z) {
        z.assign(L.out, 0.0);
        for (std::size_t o = 0; o < L.out; ++o) {
            double s = L.bias[o];
            const double* row = &L.weights[o * L.in];
            for (std::size_t i = 0; i < L.in; ++i) s += row[i] * a[i];
            z[o] = s;
        }
    }

    static Probabilities softmax(double z0, double z1) {
        // sigmoid of the logit gap; the smaller probability is never formed as 1 - p
        const double d = z1 - z0;
        const double e = std::exp(-std::abs(d));
        const double big = 1.0 / (1.0 + e), small = e / (1.0 + e);
        return d >= 0.0 ? Probabilities{small, big} : Probabilities{big, small};
    }

    Trace run(std::span<const double> x) const {
        check_arity(x);
        Trace t;
        std::vector<double> a(x.begin(), x.end());
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            t.activations.push_back(a);
            std::vector<double> z;
            affine(layers_[l], a, z);
            t.preacts.push_back(z);
            if (l + 1 < layers_.size()) {
                for (double& v : z) v = std::max(0.0, v);
            }
            a = std::move(z);
        }
        return t;
    }

    static double loss_from_logits(const Trace& t, int y) {
        // softplus(z_other - z_y), accurate for tiny losses
        const auto& z = t.preacts.back();
        const double d = z[static_cast<std::size_t>(1 - y)] - z[static_cast<std::size_t>(y)];
        return std::max(d, 0.0) + std::log1p(std::exp(-std::abs(d)));
    }

    static std::vector<double> output_delta(const Trace& t, int y) {
        const auto& z = t.preacts.back();
        const auto p = softmax(z[0], z[1]);
        std::vector<double> delta{p[0], p[1]};
        delta[static_cast<std::size_t>(y)] = -p[static_cast<std::size_t>(1 - y)];
        return delta;
    }

    /// Maps d loss / d (output of layer l) to d loss / d (input of layer l),
    /// applying the ReLU of the layer below when there is one.
    std::vector<double> pull_back(std::size_t l, const Trace& t, const std::vector<double>& delta) const {
        const auto& L = layers_[l];
        std::vector<double> back(L.in, 0.0);
        for (std::size_t o = 0; o < L.out; ++o) {
            const double* row = &L.weights[o * L.in];
            for (std::size_t i = 0; i < L.in; ++i) back[i] += delta[o] * row[i];
        }
        if (l > 0) {
            const auto& below = t.preacts[l - 1];
            for (std::size_t i = 0; i < L.in; ++i) {
                if (below[i] <= 0.0) back[i] = 0.0;
            }
        }
        return back;
    }

    std::vector<DenseLayer> layers_;
    std::uint64_t seed_ = 0;
};

} // namespace tabadv

#endif
