#include "osv/entropy.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "osv/library_io.hpp"

namespace osv {

const char* to_string(EntropyMethod m) {
    switch (m) {
    case EntropyMethod::shannon: return "shannon";
    case EntropyMethod::richness: return "richness";
    case EntropyMethod::simpson: return "simpson";
    }
    return "?";
}

EntropyMethod entropy_method_from_string(const std::string& name) {
    if (name == "shannon") return EntropyMethod::shannon;
    if (name == "richness") return EntropyMethod::richness;
    if (name == "simpson") return EntropyMethod::simpson;
    throw ConfigError("unknown entropy method: " + name);
}

ScalerSpec ScalerSpec::hyperbolic(double a, double c) {
    ScalerSpec s;
    s.kind = Kind::hyperbolic;
    s.a = a;
    s.c = c;
    s.validate();
    return s;
}

ScalerSpec ScalerSpec::exponential(double k) {
    ScalerSpec s;
    s.kind = Kind::exponential;
    s.k = k;
    s.validate();
    return s;
}

ScalerSpec ScalerSpec::sigmoid(double k, double tau) {
    ScalerSpec s;
    s.kind = Kind::sigmoid;
    s.k = k;
    s.tau = tau;
    s.validate();
    return s;
}

ScalerSpec ScalerSpec::threshold(double tau) {
    ScalerSpec s;
    s.kind = Kind::threshold;
    s.tau = tau;
    s.validate();
    return s;
}

void ScalerSpec::validate() const {
    switch (kind) {
    case Kind::hyperbolic:
        if (!(a > 0.0) || !(c > 0.0))
            throw ConfigError("hyperbolic scaler requires a > 0 and c > 0");
        break;
    case Kind::exponential:
        if (!(k > 0.0))
            throw ConfigError("exponential scaler requires k > 0");
        break;
    case Kind::sigmoid:
        if (!(k > 0.0))
            throw ConfigError("sigmoid scaler requires k > 0");
        [[fallthrough]];
    case Kind::threshold:
        if (!(tau >= 0.0 && tau <= 1.0))
            throw ConfigError("scaler threshold tau must lie in [0,1]");
        break;
    }
}

std::string ScalerSpec::name() const {
    switch (kind) {
    case Kind::hyperbolic: return "hyperbolic";
    case Kind::exponential: return "exponential";
    case Kind::sigmoid: return "sigmoid";
    case Kind::threshold: return "threshold";
    }
    return "?";
}

std::map<std::string, double> ScalerSpec::params() const {
    switch (kind) {
    case Kind::hyperbolic: return {{"a", a}, {"c", c}};
    case Kind::exponential: return {{"k", k}};
    case Kind::sigmoid: return {{"k", k}, {"tau", tau}};
    case Kind::threshold: return {{"tau", tau}};
    }
    return {};
}

RequestMatrix build_request_matrix(const InteractionLibrary& lib) {
    if (lib.empty())
        throw ValidationError("cannot build a request matrix from an empty library");
    RequestMatrix r;
    for (const auto& i : lib.interactions)
        r.width = std::max(r.width, i.request.size());
    r.rows.reserve(lib.size());
    for (const auto& i : lib.interactions) {
        std::vector<Symbol> row(r.width, kPadding);
        for (std::size_t j = 0; j < i.request.size(); ++j)
            row[j] = i.request.bytes[j];
        r.rows.push_back(std::move(row));
    }
    return r;
}

ColumnFrequencies column_frequencies(const RequestMatrix& r, std::size_t j) {
    if (j < 1 || j > r.width)
        throw ValidationError("column index " + std::to_string(j) +
                              " out of range 1.." + std::to_string(r.width));
    std::array<std::size_t, 257> counts{};
    for (const auto& row : r.rows)
        ++counts[row[j - 1]];
    ColumnFrequencies q;
    const double n = static_cast<double>(r.rows.size());
    for (std::size_t s = 0; s < counts.size(); ++s)
        if (counts[s] > 0)
            q.freq[static_cast<Symbol>(s)] = static_cast<double>(counts[s]) / n;
    return q;
}

double entropy(const ColumnFrequencies& q, EntropyMethod m, bool raw_simpson) {
    switch (m) {
    case EntropyMethod::shannon: {
        double h = 0.0;
        for (const auto& [sym, p] : q.freq)
            h -= p * std::log(p);
        return h;
    }
    case EntropyMethod::richness:
        return static_cast<double>(q.freq.size());
    case EntropyMethod::simpson: {
        double sum_sq = 0.0;
        for (const auto& [sym, p] : q.freq)
            sum_sq += p * p;
        return raw_simpson ? sum_sq : 1.0 - sum_sq;
    }
    }
    return 0.0;
}

std::vector<double> normalise(const std::vector<double>& e) {
    if (e.empty())
        throw ValidationError("cannot normalise an empty entropy vector");
    const auto [lo_it, hi_it] = std::minmax_element(e.begin(), e.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<double> out(e.size(), 0.0);
    if (hi == lo)
        return out; // flat entropy: every column maximally stable
    for (std::size_t j = 0; j < e.size(); ++j)
        out[j] = (e[j] - lo) / (hi - lo);
    return out;
}

double scale(double x, const ScalerSpec& s) {
    s.validate();
    switch (s.kind) {
    case ScalerSpec::Kind::hyperbolic:
        return 1.0 / std::pow(1.0 + s.a * x, s.c);
    case ScalerSpec::Kind::exponential:
        return std::exp(-s.k * x);
    case ScalerSpec::Kind::sigmoid:
        return 1.0 / (1.0 + std::exp(s.k * (x - s.tau)));
    case ScalerSpec::Kind::threshold:
        return x <= s.tau ? 1.0 : 1e-6;
    }
    return 1.0;
}

WeightsVector derive_weights(const InteractionLibrary& lib, EntropyMethod m,
                             const ScalerSpec& s, bool raw_simpson) {
    const RequestMatrix r = build_request_matrix(lib);
    std::vector<double> e(r.width);
    for (std::size_t j = 1; j <= r.width; ++j)
        e[j - 1] = entropy(column_frequencies(r, j), m, raw_simpson);
    const std::vector<double> n = normalise(e);

    WeightsVector w;
    w.weights.resize(r.width);
    for (std::size_t j = 0; j < r.width; ++j)
        w.weights[j] = scale(n[j], s);
    w.default_weight = scale(1.0, s);
    w.provenance.entropy_method =
        raw_simpson && m == EntropyMethod::simpson ? "simpson_raw" : to_string(m);
    w.provenance.scaler = s.name();
    w.provenance.scaler_params = s.params();
    w.provenance.library_fingerprint = library_fingerprint(lib);
    w.validate();
    return w;
}

} // namespace osv
