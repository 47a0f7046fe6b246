#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "phantom/alignment.hpp"
#include "phantom/error.hpp"
#include "phantom/vocab.hpp"

namespace phantom {

// Token IDs that appeared in a Different trial's output span but not in the
// corresponding input span, with the trials that contributed each id.
struct Blocklist {
    std::set<TokenId> blocked_ids;
    std::map<TokenId, std::vector<std::string>> provenance; // id -> trial keys

    bool blocks(TokenId id) const { return blocked_ids.count(id) > 0; }

    // Commutative union; parallel shards merge to the same result.
    void merge(const Blocklist& other) {
        for (TokenId id : other.blocked_ids) blocked_ids.insert(id);
        for (const auto& [id, keys] : other.provenance) {
            auto& mine = provenance[id];
            mine.insert(mine.end(), keys.begin(), keys.end());
            std::sort(mine.begin(), mine.end());
            mine.erase(std::unique(mine.begin(), mine.end()), mine.end());
        }
    }
};

inline std::string trial_key(const Trial& t) {
    return t.doc_id + "#" + std::to_string(t.target_index);
}

template <typename Trials>
Blocklist build_blocklist(const Trials& trials) {
    Blocklist bl;
    for (const Trial& t : trials) {
        if (t.outcome != Outcome::Different) continue;
        std::unordered_set<TokenId> input_set(t.input_span_ids.begin(),
                                              t.input_span_ids.end());
        std::unordered_set<TokenId> seen;
        for (TokenId id : t.output_span_ids) {
            if (input_set.count(id) || seen.count(id)) continue;
            seen.insert(id);
            bl.blocked_ids.insert(id);
            bl.provenance[id].push_back(trial_key(t));
        }
    }
    for (auto& [id, keys] : bl.provenance) {
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    }
    return bl;
}

struct DecodeFilter {
    Blocklist blocklist;

    bool allows_sequence(const std::vector<TokenId>& ids) const {
        for (TokenId id : ids)
            if (blocklist.blocks(id)) return false;
        return true;
    }
};

struct WeightedCandidate {
    TokenId id;
    double weight;
};

// Remove blocked candidates and renormalize the remaining weights to sum 1.
// Order is preserved.
inline std::vector<WeightedCandidate>
apply_filter(const DecodeFilter& filter, const std::vector<WeightedCandidate>& candidates) {
    double total_in = 0;
    for (const auto& c : candidates) {
        if (c.weight < 0) throw data_error("negative candidate weight");
        total_in += c.weight;
    }
    if (total_in <= 0) throw data_error("candidate weights must have positive total");
    std::vector<WeightedCandidate> kept;
    double total = 0;
    for (const auto& c : candidates) {
        if (filter.blocklist.blocks(c.id)) continue;
        kept.push_back(c);
        total += c.weight;
    }
    if (kept.empty() || total <= 0)
        throw data_error("all candidates blocked: empty support after filtering");
    for (auto& c : kept) c.weight /= total;
    return kept;
}

// id -> "forbid" sentinel for OpenAI-compatible logit_bias maps.
inline constexpr double kLogitBiasForbid = -100.0;

inline std::map<TokenId, double> export_logit_bias(const Blocklist& bl) {
    std::map<TokenId, double> out;
    for (TokenId id : bl.blocked_ids) out[id] = kLogitBiasForbid;
    return out;
}

} // namespace phantom
