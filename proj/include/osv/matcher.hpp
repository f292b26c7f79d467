#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "osv/alignment.hpp"
#include "osv/message.hpp"
#include "osv/weights.hpp"

namespace osv {

enum class Strategy { hash_lookup, nw_plain, nw_weighted };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct MatcherConfig {
    Strategy strategy = Strategy::nw_plain;
    ScoringParams scoring;
    std::optional<WeightsVector> weights; // required iff nw_weighted

    // Throws ConfigError when nw_weighted lacks weights. Returns a warning
    // when the weights' provenance fingerprint does not match `lib`
    // (matching proceeds anyway).
    std::optional<std::string> check(const InteractionLibrary& lib) const;
};

// Evidence for one selection. selected_index is 1-based; it is empty only
// for a hash lookup that found no exact match. distance is set under the
// alignment strategies. per_candidate is filled on request.
struct MatchReport {
    std::optional<std::size_t> selected_index;
    std::optional<double> distance;
    std::vector<std::pair<std::size_t, double>> per_candidate;

    bool matched() const { return selected_index.has_value(); }
};

struct MatchResult {
    Message response;         // empty on no-match and on no-response records
    bool no_response = false; // the selected interaction's flag
    MatchReport report;
};

// Exact byte-equality replay; the lowest matching index wins. The report
// carries no distance.
MatchResult hash_lookup(const InteractionLibrary& lib, const Message& req_in);

// Identity translation: the matched interaction's response is replayed
// verbatim.
Message translate(const Message& req_in, const Message& req_sim, const Message& rsp_sim);

// Selects the response for an incoming request. Under the alignment
// strategies every library request is scored and the minimum distance
// wins, ties broken by lowest index. Pure function; safe to call
// concurrently on a shared library.
MatchResult select_response(const InteractionLibrary& lib, const Message& req_in,
                            const MatcherConfig& cfg, bool collect_candidates = false);

} // namespace osv
