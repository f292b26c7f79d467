#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "osv/errors.hpp"

namespace osv {

// Where a weights vector came from: entropy method, scaler and parameters,
// and the fingerprint of the library it was derived from.
struct WeightsProvenance {
    std::string entropy_method;
    std::string scaler;
    std::map<std::string, double> scaler_params;
    std::string library_fingerprint;

    bool operator==(const WeightsProvenance&) const = default;
};

// Per-column alignment weights w_1..w_L, 1-indexed, each in (0,1], plus a
// default weight for positions beyond L (positions never observed in the
// source library).
struct WeightsVector {
    std::vector<double> weights;
    double default_weight = 1.0;
    WeightsProvenance provenance;

    std::size_t length() const { return weights.size(); }

    // 1-based column lookup; positions > L yield the default weight.
    double at(std::size_t k) const {
        return (k >= 1 && k <= weights.size()) ? weights[k - 1] : default_weight;
    }

    // Throws ValidationError unless every weight is finite, > 0 and <= 1.
    void validate() const;

    // A vector of length L with every weight (and the default) equal to 1;
    // under it the weighted alignment degenerates to the plain one.
    static WeightsVector uniform(std::size_t length);

    bool operator==(const WeightsVector&) const = default;
};

// Weights file: a single JSON object
//   { "method": ..., "scaler": {"kind": ..., <params>...},
//     "default_weight": ..., "weights": [...], "library_fingerprint": ... }
std::string weights_to_json(const WeightsVector& w);
WeightsVector weights_from_json(const std::string& text);

void weights_save_file(const WeightsVector& w, const std::string& path);
WeightsVector weights_load_file(const std::string& path);

} // namespace osv
