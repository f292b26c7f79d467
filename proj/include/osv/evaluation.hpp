#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "osv/entropy.hpp"
#include "osv/matcher.hpp"
#include "osv/message.hpp"
#include "osv/synthetic.hpp"

namespace osv {

// One point in the strategy/parameter grid. The entropy settings matter
// only for nw_weighted; weights are derived per fold from the training
// set alone.
struct StrategyPoint {
    Strategy strategy = Strategy::nw_plain;
    EntropyMethod method = EntropyMethod::shannon;
    ScalerSpec scaler = ScalerSpec::hyperbolic(1.0, 10.0);
    ScoringParams scoring;
    bool raw_simpson = false;

    std::string label() const;
    std::string params_text() const; // "a=1;c=10" style, empty when unweighted
};

struct EvaluationConfig {
    std::size_t k = 10;
    std::size_t repeats = 10;
    std::vector<std::uint64_t> seeds; // one per repeat
    std::vector<StrategyPoint> strategies;

    void validate(std::size_t library_size) const;
};

struct StrategyResult {
    StrategyPoint point;
    std::vector<double> per_repeat; // accuracy per repeat
    std::size_t valid = 0;
    std::size_t invalid = 0;
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation over repeats
};

struct AccuracyReport {
    std::size_t k = 0;
    std::size_t repeats = 0;
    std::vector<StrategyResult> rows;

    const StrategyResult& row(Strategy s) const; // first row with that strategy
};

// Seeded uniform partition of 0-based indices [0, n) into k folds whose
// sizes differ by at most one. Deterministic under (n, k, seed).
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k,
                                                  std::uint64_t seed);

// Cross-validation: per repeat and fold, the evaluation group's requests
// are matched against a library built from the training folds only
// (weights, when used, are likewise derived from the training folds
// only), and each emulated response is classified against the recorded
// one. Deterministic under the configured seeds.
AccuracyReport evaluate(const InteractionLibrary& lib, const EvaluationConfig& cfg,
                        ProtocolKind kind);

std::string report_to_json(const AccuracyReport& report);
std::string report_to_csv(const AccuracyReport& report);

} // namespace osv
