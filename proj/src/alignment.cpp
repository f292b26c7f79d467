#include "osv/alignment.hpp"

#include <algorithm>

namespace osv {

namespace {

// Per-position products w_k * d; index 0 is unused. Both the full-matrix
// and the two-row fill read these tables so their arithmetic is identical
// and the scores compare bit-equal.
void fill_weight_tables(std::size_t kmax, const ScoringParams& p,
                        const WeightsVector* w, std::vector<double>& wid,
                        std::vector<double>& wdiff, std::vector<double>& wgap) {
    wid.resize(kmax + 1);
    wdiff.resize(kmax + 1);
    wgap.resize(kmax + 1);
    for (std::size_t k = 1; k <= kmax; ++k) {
        const double wk = w ? w->at(k) : 1.0;
        wid[k] = wk * p.identical;
        wdiff[k] = wk * p.differing;
        wgap[k] = wk * p.gap;
    }
}

struct Scratch {
    std::vector<double> wid, wdiff, wgap, prev, curr;
};

Scratch& scratch() {
    static thread_local Scratch s;
    return s;
}

AlignmentResult align_impl(const Message& m1, const Message& m2,
                           const ScoringParams& p, const WeightsVector* w) {
    const std::size_t n1 = m1.size();
    const std::size_t n2 = m2.size();
    std::vector<double> wid, wdiff, wgap;
    fill_weight_tables(std::max(n1, n2), p, w, wid, wdiff, wgap);

    const std::size_t stride = n2 + 1;
    std::vector<double> f((n1 + 1) * stride, 0.0); // row 0 / column 0 stay 0
    for (std::size_t i = 1; i <= n1; ++i) {
        const std::uint8_t ai = m1.bytes[i - 1];
        for (std::size_t j = 1; j <= n2; ++j) {
            const std::size_t k = j > i ? j : i;
            const double diag =
                f[(i - 1) * stride + (j - 1)] + (ai == m2.bytes[j - 1] ? wid[k] : wdiff[k]);
            const double left = f[i * stride + (j - 1)] + wgap[k];
            const double up = f[(i - 1) * stride + j] + wgap[k];
            double best = diag;
            if (left > best) best = left;
            if (up > best) best = up;
            f[i * stride + j] = best;
        }
    }

    AlignmentResult result;
    result.score = f[n1 * stride + n2];

    // Traceback, recomputing each candidate; ties resolve diagonal, then
    // up, then left.
    std::size_t i = n1;
    std::size_t j = n2;
    auto& ra = result.aligned_a;
    auto& rb = result.aligned_b;
    while (i > 0 && j > 0) {
        const std::size_t k = j > i ? j : i;
        const double cell = f[i * stride + j];
        const double diag =
            f[(i - 1) * stride + (j - 1)] +
            (m1.bytes[i - 1] == m2.bytes[j - 1] ? wid[k] : wdiff[k]);
        if (cell == diag) {
            ra.emplace_back(m1.bytes[i - 1]);
            rb.emplace_back(m2.bytes[j - 1]);
            --i;
            --j;
            continue;
        }
        const double up = f[(i - 1) * stride + j] + wgap[k];
        if (cell == up) {
            ra.emplace_back(m1.bytes[i - 1]);
            rb.emplace_back(std::nullopt);
            --i;
        } else {
            ra.emplace_back(std::nullopt);
            rb.emplace_back(m2.bytes[j - 1]);
            --j;
        }
    }
    while (i > 0) {
        ra.emplace_back(m1.bytes[i - 1]);
        rb.emplace_back(std::nullopt);
        --i;
    }
    while (j > 0) {
        ra.emplace_back(std::nullopt);
        rb.emplace_back(m2.bytes[j - 1]);
        --j;
    }
    std::reverse(ra.begin(), ra.end());
    std::reverse(rb.begin(), rb.end());
    return result;
}

} // namespace

AlignmentResult align(const Message& m1, const Message& m2, const ScoringParams& p) {
    return align_impl(m1, m2, p, nullptr);
}

AlignmentResult align_weighted(const Message& m1, const Message& m2,
                               const ScoringParams& p, const WeightsVector& w) {
    return align_impl(m1, m2, p, &w);
}

double alignment_score(const Message& m1, const Message& m2,
                       const ScoringParams& p, const WeightsVector* w) {
    const std::size_t n1 = m1.size();
    const std::size_t n2 = m2.size();
    auto& s = scratch();
    fill_weight_tables(std::max(n1, n2), p, w, s.wid, s.wdiff, s.wgap);
    s.prev.assign(n2 + 1, 0.0);
    s.curr.resize(n2 + 1);
    const double* wid = s.wid.data();
    const double* wdiff = s.wdiff.data();
    const double* wgap = s.wgap.data();
    for (std::size_t i = 1; i <= n1; ++i) {
        s.curr[0] = 0.0;
        const std::uint8_t ai = m1.bytes[i - 1];
        const double* prev = s.prev.data();
        double* curr = s.curr.data();
        for (std::size_t j = 1; j <= n2; ++j) {
            const std::size_t k = j > i ? j : i;
            const double diag = prev[j - 1] + (ai == m2.bytes[j - 1] ? wid[k] : wdiff[k]);
            const double left = curr[j - 1] + wgap[k];
            const double up = prev[j] + wgap[k];
            double best = diag;
            if (left > best) best = left;
            if (up > best) best = up;
            curr[j] = best;
        }
        std::swap(s.prev, s.curr);
    }
    return s.prev[n2];
}

double score_max(const Message& m1, const ScoringParams& p, const WeightsVector* w) {
    double s = 0.0;
    for (std::size_t i = 1; i <= m1.size(); ++i) {
        const double wk = w ? w->at(i) : 1.0;
        s += wk * p.identical;
    }
    return s;
}

double score_min(const Message& m1, const ScoringParams& p, const WeightsVector* w) {
    double s = 0.0;
    for (std::size_t i = 1; i <= m1.size(); ++i) {
        const double wk = w ? w->at(i) : 1.0;
        s += wk * p.differing;
    }
    return s;
}

double distance(const Message& m1, const Message& m2, const ScoringParams& p,
                const WeightsVector* w) {
    if (m1.empty())
        throw ValidationError(
            "distance normalization undefined for an empty incoming request");
    p.validate();
    const double smax = score_max(m1, p, w);
    const double smin = score_min(m1, p, w);
    if (!(smax > smin))
        throw ValidationError("distance normalization undefined: S_max == S_min");
    const double score = alignment_score(m1, m2, p, w);
    return (smax - score) / (smax - smin);
}

std::string aligned_to_text(const std::vector<std::optional<std::uint8_t>>& seq) {
    std::string out;
    out.reserve(seq.size());
    for (const auto& cell : seq) {
        if (!cell) {
            out.push_back('-');
        } else {
            const std::uint8_t c = *cell;
            out.push_back(c >= 0x20 && c <= 0x7e ? static_cast<char>(c) : '.');
        }
    }
    return out;
}

} // namespace osv
