#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "phantom/error.hpp"
#include "phantom/vocab.hpp"

namespace phantom {

struct Segmentation {
    std::vector<TokenId> ids;
};

// All token-ID sequences decoding to one surface string.
struct EquivalenceClass {
    std::string surface;
    std::vector<std::vector<TokenId>> members;
    std::vector<TokenId> canonical;
};

struct EnumerateOptions {
    std::size_t limit = 10000;
    // Keep only segmentations free of single-byte tokens: the linguistically
    // plausible subclass. Byte fallback makes the unfiltered class explode.
    bool plausible_only = false;
};

namespace detail {

inline bool token_allowed(const Vocabulary& vocab, TokenId id, bool plausible_only) {
    return !plausible_only || vocab.token(id).size() > 1;
}

} // namespace detail

// Exhaustive enumeration by DP over the token trie. Membership is exact.
inline EquivalenceClass enumerate_segmentations(const Vocabulary& vocab,
                                                std::string_view surface,
                                                const EnumerateOptions& opts = {}) {
    if (surface.empty()) throw data_error("enumerate_segmentations: empty surface");

    const std::size_t n = surface.size();
    // starts[i] = tokens beginning at byte i, as (length, id).
    std::vector<std::vector<std::pair<std::uint32_t, TokenId>>> starts(n);
    std::vector<std::pair<std::uint32_t, TokenId>> buf;
    for (std::size_t i = 0; i < n; ++i) {
        vocab.trie().matches_at(surface, i, buf);
        for (auto& [len, id] : buf)
            if (detail::token_allowed(vocab, id, opts.plausible_only))
                starts[i].emplace_back(len, id);
    }
    // reachable[i]: surface[i..) admits at least one segmentation.
    std::vector<char> reachable(n + 1, 0);
    reachable[n] = 1;
    for (std::size_t i = n; i-- > 0;)
        for (auto& [len, id] : starts[i])
            if (reachable[i + len]) { reachable[i] = 1; break; }

    EquivalenceClass cls;
    cls.surface = std::string(surface);
    if (!reachable[0])
        throw data_error("surface is unencodable over this vocabulary");

    std::vector<TokenId> path;
    // Iterative DFS with explicit stack of (position, next-alternative index).
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    stack.emplace_back(0, 0);
    while (!stack.empty()) {
        auto& [pos, alt] = stack.back();
        if (pos == n) {
            if (cls.members.size() >= opts.limit)
                throw data_error("segmentation enumeration limit (" +
                                 std::to_string(opts.limit) + ") exceeded for surface");
            cls.members.push_back(path);
            stack.pop_back();
            if (!path.empty()) path.pop_back();
            continue;
        }
        bool advanced = false;
        while (alt < starts[pos].size()) {
            auto [len, id] = starts[pos][alt++];
            if (!reachable[pos + len]) continue;
            path.push_back(id);
            stack.emplace_back(pos + len, 0);
            advanced = true;
            break;
        }
        if (!advanced) {
            stack.pop_back();
            if (!path.empty()) path.pop_back();
        }
    }

    cls.canonical = vocab.encode(surface).ids;
    if (std::find(cls.members.begin(), cls.members.end(), cls.canonical) ==
        cls.members.end())
        cls.members.push_back(cls.canonical); // filter may have excluded it
    std::sort(cls.members.begin(), cls.members.end());
    return cls;
}

// Segmentation count by DP, without materializing. Saturates at uint64 max.
inline std::uint64_t count_segmentations(const Vocabulary& vocab,
                                         std::string_view surface,
                                         bool plausible_only = false) {
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    const std::size_t n = surface.size();
    std::vector<std::uint64_t> ways(n + 1, 0);
    ways[n] = 1; // the empty segmentation
    std::vector<std::pair<std::uint32_t, TokenId>> buf;
    for (std::size_t i = n; i-- > 0;) {
        vocab.trie().matches_at(surface, i, buf);
        for (auto& [len, id] : buf) {
            if (!detail::token_allowed(vocab, id, plausible_only)) continue;
            std::uint64_t w = ways[i + len];
            ways[i] = (kMax - ways[i] < w) ? kMax : ways[i] + w;
        }
    }
    return ways[0];
}

// True iff both ID sequences decode to the same surface under the
// vocabulary's convention (normalization included when enabled).
inline bool equivalent(const Vocabulary& vocab, const std::vector<TokenId>& a,
                       const std::vector<TokenId>& b) {
    return vocab.surfaces_equivalent(vocab.decode(a), vocab.decode(b));
}

} // namespace phantom
