#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "osv/alignment.hpp"
#include "osv/message.hpp"

namespace testing {

// The eight-record directory-service fixture used across the suites.
inline osv::InteractionLibrary table1() {
    auto I = [](const char* req, const char* rsp) {
        return osv::Interaction{osv::Message::from_string(req),
                                osv::Message::from_string(rsp), false};
    };
    osv::InteractionLibrary lib;
    lib.interactions = {
        I("{id:001,op:S,sn:Du}",
          "{id:001,op:SearchRsp,result:Ok,gn:Miao,sn:Du,mobile:5362634}"),
        I("{id:013,op:S,sn:Versteeg}",
          "{id:013,op:SearchRsp,result:Ok,gn:Steve,sn:Versteeg,mobile:9374723}"),
        I("{id:024,op:A,sn:Schneider}", "{id:024,op:AddRsp,result:Ok}"),
        I("{id:275,op:S,sn:Han}",
          "{id:275,op:SearchRsp,result:Ok,gn:Jun,sn:Han,mobile:33333333}"),
        I("{id:490,op:S,sn:Grundy}",
          "{id:490,op:SearchRsp,result:Ok,gn:John,sn:Grundy,mobile:44444444}"),
        I("{id:773,op:S,sn:Hine}",
          "{id:273,op:SearchRsp,result:Ok,sn:Hine,mobile:123456}"),
        I("{id:887,op:A,sn:Will}", "{id:887,op:AddRsp,result:Ok}"),
        I("{id:906,op:A,sn:Hine}", "{id:906,op:AddRsp,result:Ok}"),
    };
    return lib;
}

inline const char* kProbeHossain = "{id:552,op:S,sn:Hossain}";
inline const char* kProbeSchneider = "{id:024,op:S,sn:Schneider}";

struct Rand {
    std::mt19937_64 gen;
    explicit Rand(std::uint64_t seed) : gen(seed) {}
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(gen() % n); }

    osv::Message message(std::size_t max_len, std::size_t alphabet = 256,
                         std::size_t min_len = 0) {
        const std::size_t len = min_len + pick(max_len - min_len + 1);
        std::vector<std::uint8_t> bytes(len);
        for (auto& b : bytes)
            b = static_cast<std::uint8_t>(pick(alphabet));
        return osv::Message(std::move(bytes));
    }

    osv::InteractionLibrary library(std::size_t n, std::size_t max_len = 24) {
        osv::InteractionLibrary lib;
        for (std::size_t i = 0; i < n; ++i) {
            osv::Interaction rec;
            rec.request = message(max_len, 256, 1);
            if (pick(8) == 0) {
                rec.no_response = true;
            } else {
                rec.response = message(max_len, 256, 1);
            }
            lib.interactions.push_back(std::move(rec));
        }
        return lib;
    }

    osv::WeightsVector weights(std::size_t length) {
        osv::WeightsVector w;
        w.weights.resize(length);
        for (auto& v : w.weights)
            v = (1.0 + static_cast<double>(pick(1000))) / 1000.0; // (0,1]
        w.default_weight = (1.0 + static_cast<double>(pick(1000))) / 1000.0;
        return w;
    }
};

// Independent oracle: enumerates every global alignment path and keeps the
// best path score. Exponential; only for short inputs.
inline double brute_force_align_score(const osv::Message& a, const osv::Message& b,
                                      const osv::ScoringParams& p) {
    std::function<double(std::size_t, std::size_t)> go =
        [&](std::size_t i, std::size_t j) -> double {
        if (i == 0 && j == 0) return 0.0;
        double best = -std::numeric_limits<double>::infinity();
        if (i > 0 && j > 0)
            best = std::max(best, go(i - 1, j - 1) +
                                      osv::score_pair(a.bytes[i - 1], b.bytes[j - 1], p));
        if (i > 0) best = std::max(best, go(i - 1, j) + p.gap);
        if (j > 0) best = std::max(best, go(i, j - 1) + p.gap);
        return best;
    };
    return go(a.size(), b.size());
}

// True when `a` embeds in `b` as a subsequence; alignment score then
// saturates at S_max(a) and the distance collapses to zero.
inline bool is_subsequence(const osv::Message& a, const osv::Message& b) {
    std::size_t i = 0;
    for (std::size_t j = 0; j < b.size() && i < a.size(); ++j)
        if (b.bytes[j] == a.bytes[i]) ++i;
    return i == a.size();
}

} // namespace testing
