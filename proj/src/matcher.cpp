#include "osv/matcher.hpp"

#include "osv/errors.hpp"
#include "osv/library_io.hpp"

namespace osv {

const char* to_string(Strategy s) {
    switch (s) {
    case Strategy::hash_lookup: return "hash_lookup";
    case Strategy::nw_plain: return "nw_plain";
    case Strategy::nw_weighted: return "nw_weighted";
    }
    return "?";
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "hash" || name == "hash_lookup") return Strategy::hash_lookup;
    if (name == "nw" || name == "nw_plain") return Strategy::nw_plain;
    if (name == "nw-weighted" || name == "nw_weighted") return Strategy::nw_weighted;
    throw ConfigError("unknown strategy: " + name);
}

std::optional<std::string> MatcherConfig::check(const InteractionLibrary& lib) const {
    scoring.validate();
    if (strategy == Strategy::nw_weighted) {
        if (!weights)
            throw ConfigError("strategy nw_weighted requires a weights vector");
        weights->validate();
        const std::string& expected = weights->provenance.library_fingerprint;
        if (!expected.empty()) {
            const std::string actual = library_fingerprint(lib);
            if (actual != expected)
                return "weights were derived from a different library "
                       "(fingerprint " + expected + ", library " + actual +
                       "); proceeding";
        }
    }
    return std::nullopt;
}

MatchResult hash_lookup(const InteractionLibrary& lib, const Message& req_in) {
    if (lib.empty())
        throw ValidationError("cannot match against an empty library");
    MatchResult out;
    for (std::size_t idx = 1; idx <= lib.size(); ++idx) {
        const Interaction& cand = lib.at1(idx);
        if (cand.request == req_in) {
            out.report.selected_index = idx;
            out.response = translate(req_in, cand.request, cand.response);
            out.no_response = cand.no_response;
            return out;
        }
    }
    return out; // NO_MATCH: empty report, empty response
}

Message translate(const Message& /*req_in*/, const Message& /*req_sim*/,
                  const Message& rsp_sim) {
    return rsp_sim;
}

MatchResult select_response(const InteractionLibrary& lib, const Message& req_in,
                            const MatcherConfig& cfg, bool collect_candidates) {
    if (lib.empty())
        throw ValidationError("cannot match against an empty library");
    if (req_in.empty())
        throw ValidationError("incoming request must be non-empty");

    if (cfg.strategy == Strategy::hash_lookup)
        return hash_lookup(lib, req_in);

    const WeightsVector* w = nullptr;
    if (cfg.strategy == Strategy::nw_weighted) {
        if (!cfg.weights)
            throw ConfigError("strategy nw_weighted requires a weights vector");
        w = &*cfg.weights;
    }

    MatchResult out;
    std::size_t best_idx = 0;
    double best_dist = 0.0;
    for (std::size_t idx = 1; idx <= lib.size(); ++idx) {
        const double d = distance(req_in, lib.at1(idx).request, cfg.scoring, w);
        if (collect_candidates)
            out.report.per_candidate.emplace_back(idx, d);
        if (best_idx == 0 || d < best_dist) { // strict <: lowest index wins ties
            best_idx = idx;
            best_dist = d;
        }
    }
    const Interaction& sim = lib.at1(best_idx);
    out.report.selected_index = best_idx;
    out.report.distance = best_dist;
    out.response = translate(req_in, sim.request, sim.response);
    out.no_response = sim.no_response;
    return out;
}

} // namespace osv
