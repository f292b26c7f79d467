#include "osv/evaluation.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "osv/errors.hpp"

namespace osv {

namespace {

std::string format_params(const std::map<std::string, double>& params) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [name, value] : params) {
        if (!first) out << ';';
        first = false;
        out << name << '=' << value;
    }
    return out.str();
}

} // namespace

std::string StrategyPoint::params_text() const {
    if (strategy != Strategy::nw_weighted) return "";
    return format_params(scaler.params());
}

std::string StrategyPoint::label() const {
    std::string out = to_string(strategy);
    if (strategy == Strategy::nw_weighted) {
        out += std::string("/") +
               (raw_simpson && method == EntropyMethod::simpson ? "simpson_raw"
                                                                : to_string(method));
        out += "/" + scaler.name() + "(" + params_text() + ")";
    }
    return out;
}

void EvaluationConfig::validate(std::size_t library_size) const {
    if (k < 2)
        throw ConfigError("fold count k must be >= 2");
    if (library_size < k)
        throw ConfigError("cannot partition " + std::to_string(library_size) +
                          " interactions into " + std::to_string(k) + " folds");
    if (repeats == 0)
        throw ConfigError("repeats must be >= 1");
    if (seeds.size() != repeats)
        throw ConfigError("expected " + std::to_string(repeats) + " seeds, got " +
                          std::to_string(seeds.size()));
    if (strategies.empty())
        throw ConfigError("at least one strategy is required");
    for (const auto& point : strategies) {
        point.scoring.validate();
        if (point.strategy == Strategy::nw_weighted)
            point.scaler.validate();
    }
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k,
                                                  std::uint64_t seed) {
    if (k < 2)
        throw ConfigError("fold count k must be >= 2");
    if (n < k)
        throw ConfigError("cannot partition " + std::to_string(n) +
                          " items into " + std::to_string(k) + " folds");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    // Fisher-Yates with modulo draws: identical output on every platform.
    std::mt19937_64 gen(seed);
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[gen() % (i + 1)]);

    std::vector<std::vector<std::size_t>> folds(k);
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t next = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t take = base + (f < extra ? 1 : 0);
        folds[f].assign(order.begin() + next, order.begin() + next + take);
        next += take;
    }
    return folds;
}

const StrategyResult& AccuracyReport::row(Strategy s) const {
    for (const auto& r : rows)
        if (r.point.strategy == s) return r;
    throw ConfigError(std::string("report has no row for strategy ") + to_string(s));
}

AccuracyReport evaluate(const InteractionLibrary& lib, const EvaluationConfig& cfg,
                        ProtocolKind kind) {
    cfg.validate(lib.size());
    for (std::size_t i = 0; i < lib.size(); ++i) {
        try {
            decode(lib.interactions[i].response, kind);
        } catch (const ParseError& e) {
            throw ValidationError("dataset error: response of interaction " +
                                  std::to_string(i + 1) + " does not decode: " +
                                  e.what());
        }
    }

    AccuracyReport report;
    report.k = cfg.k;
    report.repeats = cfg.repeats;
    report.rows.resize(cfg.strategies.size());
    for (std::size_t p = 0; p < cfg.strategies.size(); ++p)
        report.rows[p].point = cfg.strategies[p];

    for (std::size_t r = 0; r < cfg.repeats; ++r) {
        std::vector<std::size_t> valid(cfg.strategies.size(), 0);
        std::vector<std::size_t> invalid(cfg.strategies.size(), 0);
        const auto folds = kfold_split(lib.size(), cfg.k, cfg.seeds[r]);
        for (const auto& fold : folds) {
            // Training-only view: evaluation records never reach the
            // matcher or the weight derivation.
            std::vector<bool> held_out(lib.size(), false);
            for (std::size_t idx : fold)
                held_out[idx] = true;
            InteractionLibrary training;
            training.interactions.reserve(lib.size() - fold.size());
            for (std::size_t i = 0; i < lib.size(); ++i)
                if (!held_out[i])
                    training.interactions.push_back(lib.interactions[i]);

            std::map<std::string, WeightsVector> weight_cache;
            for (std::size_t p = 0; p < cfg.strategies.size(); ++p) {
                const StrategyPoint& point = cfg.strategies[p];
                MatcherConfig mcfg;
                mcfg.strategy = point.strategy;
                mcfg.scoring = point.scoring;
                if (point.strategy == Strategy::nw_weighted) {
                    const std::string key =
                        std::string(to_string(point.method)) +
                        (point.raw_simpson ? "#raw" : "") + "/" + point.scaler.name() +
                        "(" + format_params(point.scaler.params()) + ")";
                    auto it = weight_cache.find(key);
                    if (it == weight_cache.end())
                        it = weight_cache
                                 .emplace(key, derive_weights(training, point.method,
                                                              point.scaler,
                                                              point.raw_simpson))
                                 .first;
                    mcfg.weights = it->second;
                }
                for (std::size_t idx : fold) {
                    const Interaction& probe = lib.interactions[idx];
                    const MatchResult got =
                        select_response(training, probe.request, mcfg);
                    if (classify_response(got.response, probe.response, kind))
                        ++valid[p];
                    else
                        ++invalid[p];
                }
            }
        }
        for (std::size_t p = 0; p < cfg.strategies.size(); ++p) {
            auto& row = report.rows[p];
            row.valid += valid[p];
            row.invalid += invalid[p];
            const double total = static_cast<double>(valid[p] + invalid[p]);
            row.per_repeat.push_back(total > 0 ? valid[p] / total : 0.0);
        }
    }

    for (auto& row : report.rows) {
        double sum = 0.0;
        for (double a : row.per_repeat)
            sum += a;
        row.mean = sum / static_cast<double>(row.per_repeat.size());
        if (row.per_repeat.size() > 1) {
            double ss = 0.0;
            for (double a : row.per_repeat)
                ss += (a - row.mean) * (a - row.mean);
            row.stddev = std::sqrt(ss / static_cast<double>(row.per_repeat.size() - 1));
        }
    }
    return report;
}

std::string report_to_json(const AccuracyReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json params = nlohmann::json::object();
        if (row.point.strategy == Strategy::nw_weighted)
            for (const auto& [name, value] : row.point.scaler.params())
                params[name] = value;
        rows.push_back({
            {"strategy", to_string(row.point.strategy)},
            {"entropy_method",
             row.point.strategy == Strategy::nw_weighted
                 ? (row.point.raw_simpson && row.point.method == EntropyMethod::simpson
                        ? "simpson_raw"
                        : to_string(row.point.method))
                 : "none"},
            {"scaler",
             row.point.strategy == Strategy::nw_weighted ? row.point.scaler.name()
                                                         : "none"},
            {"params", params},
            {"per_repeat", row.per_repeat},
            {"valid", row.valid},
            {"invalid", row.invalid},
            {"mean", row.mean},
            {"stddev", row.stddev},
        });
    }
    nlohmann::json j;
    j["k"] = report.k;
    j["repeats"] = report.repeats;
    j["rows"] = rows;
    return j.dump(2);
}

std::string report_to_csv(const AccuracyReport& report) {
    std::ostringstream out;
    out << "strategy,entropy_method,scaler,params,repeat,accuracy\n";
    for (const auto& row : report.rows) {
        const bool weighted = row.point.strategy == Strategy::nw_weighted;
        for (std::size_t r = 0; r < row.per_repeat.size(); ++r) {
            out << to_string(row.point.strategy) << ','
                << (weighted ? (row.point.raw_simpson &&
                                        row.point.method == EntropyMethod::simpson
                                    ? "simpson_raw"
                                    : to_string(row.point.method))
                             : "none")
                << ',' << (weighted ? row.point.scaler.name() : "none") << ','
                << row.point.params_text() << ',' << (r + 1) << ','
                << row.per_repeat[r] << '\n';
        }
    }
    return out.str();
}

} // namespace osv
