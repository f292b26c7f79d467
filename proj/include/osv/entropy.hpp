#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "osv/message.hpp"
#include "osv/weights.hpp"

namespace osv {

// A matrix cell is an octet or the padding symbol for positions beyond a
// request's length.
using Symbol = std::uint16_t;
constexpr Symbol kPadding = 256;

// Requests of the library padded to a common width L (the longest request
// length), one row per interaction, in library order.
struct RequestMatrix {
    std::size_t width = 0;                 // L
    std::vector<std::vector<Symbol>> rows; // each row has exactly `width` cells
};

// Relative frequency of each symbol occurring in one column. Only symbols
// that occur are present, so every value is > 0 and the values sum to 1.
// The padding symbol counts like any other symbol, which keeps ragged
// columns a proper probability distribution.
struct ColumnFrequencies {
    std::map<Symbol, double> freq;
};

enum class EntropyMethod { shannon, richness, simpson };

const char* to_string(EntropyMethod m);
EntropyMethod entropy_method_from_string(const std::string& name);

// Monotone non-increasing map from normalized entropy to a weight.
struct ScalerSpec {
    enum class Kind { hyperbolic, exponential, sigmoid, threshold };

    Kind kind = Kind::hyperbolic;
    double a = 1.0;    // hyperbolic
    double c = 10.0;   // hyperbolic
    double k = 10.0;   // exponential, sigmoid
    double tau = 0.5;  // sigmoid, threshold

    static ScalerSpec hyperbolic(double a, double c);
    static ScalerSpec exponential(double k);
    static ScalerSpec sigmoid(double k, double tau);
    static ScalerSpec threshold(double tau);

    void validate() const;
    std::string name() const;
    std::map<std::string, double> params() const;
};

RequestMatrix build_request_matrix(const InteractionLibrary& lib);

// j is 1-based; throws ValidationError when out of range.
ColumnFrequencies column_frequencies(const RequestMatrix& r, std::size_t j);

// shannon: -sum q ln q; richness: number of occurring symbols; simpson:
// the Gini-Simpson form 1 - sum q^2 so that, like the other two, larger
// values mean more diverse columns. raw_simpson selects the unflipped
// sum q^2 for fidelity experiments.
double entropy(const ColumnFrequencies& q, EntropyMethod m, bool raw_simpson = false);

// Affine rescale onto [0,1]: min -> 0, max -> 1. A flat input maps to all
// zeros (every column maximally stable).
std::vector<double> normalise(const std::vector<double>& e);

// hyperbolic: 1/(1+a*x)^c; exponential: e^(-k*x); sigmoid:
// 1/(1+e^(k*(x-tau))); threshold: 1 if x <= tau else 1e-6. The threshold
// floor keeps every weight strictly positive.
double scale(double x, const ScalerSpec& s);

// Full pipeline: request matrix -> per-column entropy -> normalise ->
// scale. The default weight for positions beyond L is scale(1), the
// weight of a maximally diverse column. Provenance records the method,
// scaler and source-library fingerprint.
WeightsVector derive_weights(const InteractionLibrary& lib, EntropyMethod m,
                             const ScalerSpec& s, bool raw_simpson = false);

} // namespace osv
