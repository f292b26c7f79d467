#include "osv/weights.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace osv {

void WeightsVector::validate() const {
    auto check = [](double w, const std::string& what) {
        if (!std::isfinite(w) || w <= 0.0 || w > 1.0)
            throw ValidationError(what + " must be finite, > 0 and <= 1, got " +
                                  std::to_string(w));
    };
    for (std::size_t j = 0; j < weights.size(); ++j)
        check(weights[j], "weight w_" + std::to_string(j + 1));
    check(default_weight, "default weight");
}

WeightsVector WeightsVector::uniform(std::size_t length) {
    WeightsVector w;
    w.weights.assign(length, 1.0);
    w.default_weight = 1.0;
    w.provenance.entropy_method = "none";
    w.provenance.scaler = "uniform";
    return w;
}

std::string weights_to_json(const WeightsVector& w) {
    nlohmann::json scaler;
    scaler["kind"] = w.provenance.scaler;
    for (const auto& [name, value] : w.provenance.scaler_params)
        scaler[name] = value;
    nlohmann::json j;
    j["method"] = w.provenance.entropy_method;
    j["scaler"] = scaler;
    j["default_weight"] = w.default_weight;
    j["weights"] = w.weights;
    j["library_fingerprint"] = w.provenance.library_fingerprint;
    return j.dump();
}

WeightsVector weights_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("invalid weights JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("weights") || !j["weights"].is_array())
        throw LoadError("weights JSON must be an object with a \"weights\" array");
    WeightsVector w;
    try {
        w.weights = j["weights"].get<std::vector<double>>();
        w.default_weight = j.value("default_weight", 1.0);
        w.provenance.entropy_method = j.value("method", "");
        w.provenance.library_fingerprint = j.value("library_fingerprint", "");
        if (j.contains("scaler") && j["scaler"].is_object()) {
            for (const auto& [key, value] : j["scaler"].items()) {
                if (key == "kind")
                    w.provenance.scaler = value.get<std::string>();
                else if (value.is_number())
                    w.provenance.scaler_params[key] = value.get<double>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("invalid weights JSON: ") + e.what());
    }
    w.validate();
    return w;
}

void weights_save_file(const WeightsVector& w, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open weights file for writing: " + path);
    out << weights_to_json(w) << '\n';
    if (!out)
        throw IoError("weights write failed: " + path);
}

WeightsVector weights_load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open weights file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return weights_from_json(buf.str());
}

} // namespace osv
