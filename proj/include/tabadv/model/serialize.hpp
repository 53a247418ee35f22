#ifndef TABADV_MODEL_SERIALIZE_HPP
#define TABADV_MODEL_SERIALIZE_HPP

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "tabadv/model/mlp.hpp"

namespace tabadv {

inline nlohmann::json model_to_json(const MlpModel& m) {
    nlohmann::json weights = nlohmann::json::array();
    nlohmann::json biases = nlohmann::json::array();
    for (const auto& L : m.layers()) {
        weights.push_back(L.weights);
        biases.push_back(L.bias);
    }
    return {{"format", "tabadv-mlp/1"}, {"layer_sizes", m.layer_sizes()}, {"weights", weights},
            {"biases", biases},         {"seed", m.seed()},               {"fingerprint", m.fingerprint}};
}

inline MlpModel model_from_json(const nlohmann::json& j) {
    try {
        const auto sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
        const auto& weights = j.at("weights");
        const auto& biases = j.at("biases");
        if (sizes.size() < 2 || weights.size() != sizes.size() - 1 || biases.size() != sizes.size() - 1) {
            throw ConfigError("model layer arrays do not match layer_sizes");
        }
        std::vector<DenseLayer> layers;
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
            DenseLayer L;
            L.in = sizes[l];
            L.out = sizes[l + 1];
            L.weights = weights[l].get<std::vector<double>>();
            L.bias = biases[l].get<std::vector<double>>();
            layers.push_back(std::move(L));
        }
        MlpModel m(std::move(layers), j.value("seed", std::uint64_t{0}));
        m.fingerprint = j.value("fingerprint", std::string{});
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed model file: ") + e.what());
    }
}

inline void save_model(const std::filesystem::path& path, const MlpModel& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write model file " + path.string());
    }
    out << model_to_json(m).dump(1) << "\n";
}

inline MlpModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open model file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

} // namespace tabadv

#endif
