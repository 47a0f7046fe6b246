#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phantom/error.hpp"
#include "phantom/probe.hpp"
#include "phantom/segmentation.hpp"
#include "phantom/vocab.hpp"
#include "phantom/words.hpp"

namespace phantom {

enum class Outcome { Unchanged, Replaced, Different, Discarded };

inline const char* outcome_name(Outcome o) {
    switch (o) {
    case Outcome::Unchanged: return "unchanged";
    case Outcome::Replaced: return "replaced";
    case Outcome::Different: return "different";
    case Outcome::Discarded: return "discarded";
    }
    return "?";
}

inline Outcome parse_outcome(std::string_view s) {
    if (s == "unchanged") return Outcome::Unchanged;
    if (s == "replaced") return Outcome::Replaced;
    if (s == "different") return Outcome::Different;
    if (s == "discarded") return Outcome::Discarded;
    throw data_error("unknown outcome: '" + std::string(s) + "'");
}

struct Trial {
    std::string doc_id;
    std::uint32_t target_index = 0;
    std::string input_word;
    std::vector<TokenId> input_span_ids;
    std::string output_surface;
    std::vector<TokenId> output_span_ids;
    Outcome outcome = Outcome::Discarded;
    std::string error_type;     // taxonomy label, Different trials only
    std::uint32_t fired_mask = 0;
};

// Region of the output text owned by one target, or Discarded.
struct AlignedRegion {
    std::uint32_t target_index = 0;
    bool discarded = false;
    ByteRange word_range;  // trimmed to word-run boundaries
    ByteRange extended;    // preceding gap + word
};

// Minimal contiguous token subsequence whose byte ranges cover `range`.
inline std::vector<TokenId> extract_token_span(const Encoding& enc, ByteRange range) {
    std::uint32_t text_end = enc.offsets.empty() ? 0 : enc.offsets.back().end;
    if (range.end > text_end || range.begin > range.end)
        throw data_error("token span range outside encoded text");
    std::vector<TokenId> out;
    for (std::size_t i = 0; i < enc.ids.size(); ++i) {
        const ByteRange& r = enc.offsets[i];
        if (r.end <= range.begin) continue;
        if (r.begin >= range.end) break;
        out.push_back(enc.ids[i]);
    }
    return out;
}

// Assign byte offsets of `text` to a model-produced ID sequence. Exact
// tiling is required, except that with whitespace normalization enabled a
// token may absorb an unmatched whitespace byte run from the text (the
// space-dropping artifact) or shed a leading space the text lacks.
inline Encoding assign_offsets(const Vocabulary& vocab, const std::vector<TokenId>& ids,
                               std::string_view text) {
    Encoding enc;
    enc.ids = ids;
    const bool lenient = vocab.normalize_whitespace();
    std::size_t p = 0;
    for (TokenId id : ids) {
        const std::string& s = vocab.token(id);
        if (text.compare(p, s.size(), s) == 0) {
            enc.offsets.push_back({static_cast<std::uint32_t>(p),
                                   static_cast<std::uint32_t>(p + s.size())});
            p += s.size();
            continue;
        }
        if (lenient) {
            // token lacks whitespace that the text has: absorb the gap
            std::size_t run = p;
            while (run < text.size() && is_ascii_space(static_cast<unsigned char>(text[run])))
                ++run;
            bool placed = false;
            if (is_pure_whitespace(s) && run > p) {
                enc.offsets.push_back({static_cast<std::uint32_t>(p),
                                       static_cast<std::uint32_t>(p + 1)});
                p += 1;
                placed = true;
            }
            if (!placed && !is_ascii_space(static_cast<unsigned char>(s[0]))) {
                for (std::size_t j = p + 1; j <= run && !placed; ++j) {
                    if (text.compare(j, s.size(), s) == 0) {
                        enc.offsets.push_back({static_cast<std::uint32_t>(p),
                                               static_cast<std::uint32_t>(j + s.size())});
                        p = j + s.size();
                        placed = true;
                    }
                }
            }
            if (!placed && is_ascii_space(static_cast<unsigned char>(s[0]))) {
                // text lacks whitespace the token carries
                std::size_t k = 0;
                while (k < s.size() && is_ascii_space(static_cast<unsigned char>(s[k]))) ++k;
                std::string_view bare = std::string_view(s).substr(k);
                if (text.compare(p, bare.size(), bare) == 0) {
                    enc.offsets.push_back({static_cast<std::uint32_t>(p),
                                           static_cast<std::uint32_t>(p + bare.size())});
                    p += bare.size();
                    placed = true;
                }
            }
            if (placed) continue;
        }
        throw data_error("output token ids do not detokenize to the output text (byte " +
                         std::to_string(p) + ")");
    }
    if (p != text.size())
        throw data_error("output token ids end before the output text does");
    return enc;
}

namespace detail {

// Indices of an LCS matching between two string sequences, as (ia, ib) pairs.
inline std::vector<std::pair<std::size_t, std::size_t>>
lcs_match(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<std::uint32_t>> dp(n + 1, std::vector<std::uint32_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            dp[i][j] = a[i] == b[j] ? dp[i + 1][j + 1] + 1
                                    : std::max(dp[i + 1][j], dp[i][j + 1]);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (a[i] == b[j]) {
            out.emplace_back(i, j);
            ++i; ++j;
        } else if (dp[i + 1][j] >= dp[i][j + 1]) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

} // namespace detail

// Anchor-based alignment: non-target words must match between input and
// output; each target's output region is the text strictly between its
// neighboring matched anchors. An LCS pass over anchors localizes context
// damage so one corrupted region does not discard the whole document.
inline std::vector<AlignedRegion> align(const AnnotatedDoc& doc,
                                        std::string_view output_text) {
    std::vector<WordSpan> in_words = split_words(doc.original_text);
    std::vector<WordSpan> out_words = split_words(output_text);

    // Map each target to its word index.
    std::vector<std::optional<std::uint32_t>> target_of_word(in_words.size());
    {
        std::size_t w = 0;
        for (std::uint32_t t = 0; t < doc.targets.size(); ++t) {
            while (w < in_words.size() && in_words[w].core_begin != doc.targets[t].begin)
                ++w;
            if (w == in_words.size())
                throw data_error("target span does not start a word: doc " + doc.doc_id);
            target_of_word[w] = t;
            ++w;
        }
    }

    std::vector<std::string> anchors;
    std::vector<std::size_t> anchor_word; // anchor index -> input word index
    for (std::size_t w = 0; w < in_words.size(); ++w) {
        if (target_of_word[w]) continue;
        anchors.emplace_back(doc.original_text.substr(in_words[w].begin,
                                                      in_words[w].end - in_words[w].begin));
        anchor_word.push_back(w);
    }
    std::vector<std::string> out_strs;
    out_strs.reserve(out_words.size());
    for (const auto& w : out_words)
        out_strs.emplace_back(output_text.substr(w.begin, w.end - w.begin));

    auto matches = detail::lcs_match(anchors, out_strs);
    // matched output word index per anchor, or npos
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<std::size_t> anchor_out(anchors.size(), npos);
    for (auto& [ia, ib] : matches) anchor_out[ia] = ib;

    std::vector<AlignedRegion> regions;
    regions.reserve(doc.targets.size());

    // Walk runs of consecutive target words delimited by anchors.
    std::size_t anchor_idx = 0;
    std::size_t w = 0;
    while (w < in_words.size()) {
        if (!target_of_word[w]) { ++anchor_idx; ++w; continue; }
        std::size_t run_begin = w;
        std::vector<std::uint32_t> run_targets;
        while (w < in_words.size() && target_of_word[w]) {
            run_targets.push_back(*target_of_word[w]);
            ++w;
        }
        // Flanking anchors: anchor_idx-1 precedes the run, anchor_idx follows.
        bool left_ok = run_begin == 0 ||
                       (anchor_idx > 0 && anchor_out[anchor_idx - 1] != npos);
        bool right_ok = w == in_words.size() ||
                        (anchor_idx < anchors.size() && anchor_out[anchor_idx] != npos);
        std::size_t out_lo = 0; // first output word index in the region
        std::size_t out_hi = out_words.size();
        if (run_begin != 0 && left_ok) out_lo = anchor_out[anchor_idx - 1] + 1;
        if (w != in_words.size() && right_ok) out_hi = anchor_out[anchor_idx];

        auto discard_run = [&] {
            for (std::uint32_t t : run_targets)
                regions.push_back({t, true, {}, {}});
        };
        if (!left_ok || !right_ok || out_hi < out_lo) {
            discard_run();
            continue;
        }
        std::size_t k = run_targets.size();
        std::size_t avail = out_hi - out_lo;
        if (avail == 0) {
            discard_run(); // target word(s) deleted from the output
        } else if (k == 1) {
            // one target may expand into a multi-word replacement
            AlignedRegion r;
            r.target_index = run_targets[0];
            r.word_range = {out_words[out_lo].begin, out_words[out_hi - 1].end};
            std::uint32_t gap_start =
                out_lo == 0 ? 0 : out_words[out_lo - 1].end;
            r.extended = {gap_start, r.word_range.end};
            regions.push_back(r);
        } else if (avail == k) {
            for (std::size_t i = 0; i < k; ++i) {
                AlignedRegion r;
                r.target_index = run_targets[i];
                std::size_t ow = out_lo + i;
                r.word_range = {out_words[ow].begin, out_words[ow].end};
                std::uint32_t gap_start = ow == 0 ? 0 : out_words[ow - 1].end;
                r.extended = {gap_start, r.word_range.end};
                regions.push_back(r);
            }
        } else {
            discard_run(); // cannot attribute words to targets
        }
    }
    std::sort(regions.begin(), regions.end(),
              [](const AlignedRegion& a, const AlignedRegion& b) {
                  return a.target_index < b.target_index;
              });
    return regions;
}

// Extended input span of a target: preceding inter-word gap + word.
inline ByteRange input_extended_span(const AnnotatedDoc& doc, std::uint32_t target_index) {
    const TargetSpan& t = doc.targets.at(target_index);
    std::vector<WordSpan> words = split_words(doc.original_text);
    std::uint32_t gap_start = 0;
    for (const auto& w : words) {
        if (w.core_begin == t.begin) break;
        gap_start = w.end;
    }
    return {gap_start, t.end};
}

namespace detail {

// Non-whitespace surface of an output region, with the input run's trailing
// punctuation stripped when it reappears verbatim.
inline std::string region_word_surface(std::string_view output_text, ByteRange word_range,
                                       std::string_view trailing_punct) {
    std::string s;
    for (std::size_t i = word_range.begin; i < word_range.end; ++i)
        if (!is_ascii_space(static_cast<unsigned char>(output_text[i])))
            s.push_back(output_text[i]);
    if (!trailing_punct.empty() && s.size() > trailing_punct.size() &&
        s.ends_with(trailing_punct))
        s.resize(s.size() - trailing_punct.size());
    return s;
}

} // namespace detail

struct ClassifiedDoc {
    std::vector<Trial> trials;
};

// Classify every target of one document. `output_enc` must be an encoding of
// `output_text` (model ids via assign_offsets, or the canonical encoding).
inline std::vector<Trial> classify_document(const Vocabulary& vocab,
                                            const AnnotatedDoc& doc,
                                            std::string_view output_text,
                                            const Encoding& input_enc,
                                            const Encoding& output_enc) {
    std::vector<WordSpan> in_words = split_words(doc.original_text);
    std::vector<AlignedRegion> regions = align(doc, output_text);
    std::vector<Trial> trials;
    trials.reserve(regions.size());
    for (const AlignedRegion& r : regions) {
        const TargetSpan& t = doc.targets.at(r.target_index);
        Trial trial;
        trial.doc_id = doc.doc_id;
        trial.target_index = r.target_index;
        trial.input_word = t.word;
        trial.input_span_ids = extract_token_span(input_enc,
                                                  input_extended_span(doc, r.target_index));
        if (r.discarded) {
            trial.outcome = Outcome::Discarded;
            trials.push_back(std::move(trial));
            continue;
        }
        // trailing punctuation the probe kept outside the target span
        std::string trailing;
        for (const auto& w : in_words) {
            if (w.core_begin == t.begin) {
                trailing = doc.original_text.substr(w.core_end, w.end - w.core_end);
                break;
            }
        }
        trial.output_surface =
            detail::region_word_surface(output_text, r.word_range, trailing);
        // Reappearing trailing punctuation sits outside the compared span on
        // the input side; keep the output side symmetric.
        ByteRange out_ext = r.extended;
        if (!trailing.empty()) {
            std::string_view region(output_text.data() + r.word_range.begin,
                                    r.word_range.end - r.word_range.begin);
            if (region.size() > trailing.size() && region.ends_with(trailing))
                out_ext.end -= static_cast<std::uint32_t>(trailing.size());
        }
        trial.output_span_ids = extract_token_span(output_enc, out_ext);
        if (trial.output_surface != trial.input_word) {
            trial.outcome = Outcome::Replaced;
        } else if (trial.output_span_ids == trial.input_span_ids) {
            trial.outcome = Outcome::Unchanged;
        } else {
            trial.outcome = Outcome::Different;
        }
        trials.push_back(std::move(trial));
    }
    return trials;
}

} // namespace phantom
