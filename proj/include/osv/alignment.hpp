#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "osv/message.hpp"
#include "osv/weights.hpp"

namespace osv {

// Scoring constants for aligned symbol pairs and gaps.
struct ScoringParams {
    double identical = 1.0;
    double differing = -1.0;
    double gap = 0.0;

    // identical > differing is required for the distance normalization
    // denominator to be positive.
    void validate() const {
        if (!(identical > differing))
            throw ValidationError("scoring requires d_identical > d_differing");
    }
};

inline double score_pair(std::uint8_t a, std::uint8_t b, const ScoringParams& p) {
    return a == b ? p.identical : p.differing;
}

// One optimal global alignment. The two aligned sequences have equal
// length; a nullopt cell is a gap; no column is a gap in both sequences.
struct AlignmentResult {
    double score = 0.0;
    std::vector<std::optional<std::uint8_t>> aligned_a;
    std::vector<std::optional<std::uint8_t>> aligned_b;
};

// Global alignment over an (n1+1) x (n2+1) score grid with row 0 and
// column 0 initialized to 0. Traceback ties resolve diagonal, then up,
// then left, which makes the returned alignment deterministic.
AlignmentResult align(const Message& m1, const Message& m2, const ScoringParams& p);

// Weighted variant: every candidate move into cell (i,j) is scaled by
// w_k with k = max{i,j}; positions past the vector use its default weight.
// With all weights equal to 1 this is exactly align().
AlignmentResult align_weighted(const Message& m1, const Message& m2,
                               const ScoringParams& p, const WeightsVector& w);

// Terminal-cell score only, two-row storage. Same recurrence as align /
// align_weighted (w == nullptr selects the unweighted grid); the value is
// bit-identical to the full-matrix score.
double alignment_score(const Message& m1, const Message& m2,
                       const ScoringParams& p, const WeightsVector* w = nullptr);

// Best and worst achievable scores for m1, used as normalization anchors.
// score_min scores every symbol of m1 against a symbol outside the
// alphabet, i.e. |m1| mismatches.
double score_max(const Message& m1, const ScoringParams& p,
                 const WeightsVector* w = nullptr);
double score_min(const Message& m1, const ScoringParams& p,
                 const WeightsVector* w = nullptr);

// Normalized dissimilarity of m2 relative to m1 (m1 is the incoming
// request): (S_max(m1) - Score(m1,m2)) / (S_max(m1) - S_min(m1)).
// Zero iff the alignment attains S_max; no clamping is applied.
// Throws ValidationError when m1 is empty or S_max == S_min.
double distance(const Message& m1, const Message& m2, const ScoringParams& p,
                const WeightsVector* w = nullptr);

// Text rendering for the CLI dump: '-' marks a gap, non-printable octets
// render as '.'.
std::string aligned_to_text(const std::vector<std::optional<std::uint8_t>>& seq);

} // namespace osv
