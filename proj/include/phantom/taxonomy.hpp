#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "phantom/text.hpp"
#include "phantom/vocab.hpp"

namespace phantom {

enum class ErrorType {
    E1_WhitespaceBoundaryShift,
    E2_WhitespaceDetachReattach,
    E3_NewlineSubstitution,
    E4_IntraWordResegmentation,
    E5_ProperNounSegmentation,
    E6_MorphologicalSurfacing,
    E7_AcronymSplit,
    E8_PluralPossessiveTail,
    Other,
};

inline const char* error_type_name(ErrorType e) {
    switch (e) {
    case ErrorType::E1_WhitespaceBoundaryShift: return "E1_whitespace_boundary_shift";
    case ErrorType::E2_WhitespaceDetachReattach: return "E2_whitespace_detach_reattach";
    case ErrorType::E3_NewlineSubstitution: return "E3_newline_substitution";
    case ErrorType::E4_IntraWordResegmentation: return "E4_intra_word_resegmentation";
    case ErrorType::E5_ProperNounSegmentation: return "E5_proper_noun_segmentation";
    case ErrorType::E6_MorphologicalSurfacing: return "E6_morphological_surfacing";
    case ErrorType::E7_AcronymSplit: return "E7_acronym_split";
    case ErrorType::E8_PluralPossessiveTail: return "E8_plural_possessive_tail";
    case ErrorType::Other: return "other";
    }
    return "?";
}

inline ErrorType parse_error_type(std::string_view s) {
    for (ErrorType e : {ErrorType::E1_WhitespaceBoundaryShift,
                        ErrorType::E2_WhitespaceDetachReattach,
                        ErrorType::E3_NewlineSubstitution,
                        ErrorType::E4_IntraWordResegmentation,
                        ErrorType::E5_ProperNounSegmentation,
                        ErrorType::E6_MorphologicalSurfacing,
                        ErrorType::E7_AcronymSplit,
                        ErrorType::E8_PluralPossessiveTail, ErrorType::Other})
        if (s == error_type_name(e)) return e;
    throw data_error("unknown error type: '" + std::string(s) + "'");
}

// Common English prefixes/suffixes for the morphological-surfacing check.
// "s" is deliberately absent: the plural/possessive tail check owns it.
inline const std::unordered_set<std::string>& default_affixes() {
    static const std::unordered_set<std::string> set = {
        "re", "un", "dis", "pre", "ing", "ed", "er", "ly", "tion",
    };
    return set;
}

struct TaxonomyResult {
    ErrorType type = ErrorType::Other;
    std::uint32_t fired_mask = 0; // bit (i-1) set when the Ei predicate fired
};

namespace detail {

inline std::string strip_leading_ws(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && is_ascii_space(static_cast<unsigned char>(s[i]))) ++i;
    return std::string(s.substr(i));
}

inline bool all_uppercase_letters(std::string_view s) {
    if (s.empty()) return false;
    for (unsigned char c : s)
        if (!std::isupper(c)) return false;
    return true;
}

// Character cut points of a word-portion token sequence, as cumulative
// stripped lengths (excluding 0 and the total).
inline std::vector<std::size_t> cut_points(const std::vector<std::string>& stripped) {
    std::vector<std::size_t> cuts;
    std::size_t acc = 0;
    for (std::size_t i = 0; i + 1 < stripped.size(); ++i) {
        acc += stripped[i].size();
        cuts.push_back(acc);
    }
    return cuts;
}

} // namespace detail

// Deterministic predicates over the (input span, output span) token pair of a
// Different trial, resolved in fixed precedence order
// E3 -> E2 -> E1 -> E7 -> E8 -> E5 -> E6 -> E4 -> Other.
inline TaxonomyResult
classify_error(const Vocabulary& vocab, const std::vector<TokenId>& input_ids,
               const std::vector<TokenId>& output_ids, const std::string& word,
               const std::unordered_set<std::string>& affixes = default_affixes()) {
    std::vector<std::string> in_toks, out_toks;
    for (TokenId id : input_ids) in_toks.push_back(vocab.token(id));
    for (TokenId id : output_ids) out_toks.push_back(vocab.token(id));

    auto word_portion = [](const std::vector<std::string>& toks) {
        std::vector<std::string> wp;
        for (const auto& t : toks)
            if (!is_pure_whitespace(t)) wp.push_back(t);
        return wp;
    };
    std::vector<std::string> wp_in = word_portion(in_toks);
    std::vector<std::string> wp_out = word_portion(out_toks);
    auto stripped = [](const std::vector<std::string>& wp) {
        std::vector<std::string> s;
        for (const auto& t : wp) s.push_back(detail::strip_leading_ws(t));
        return s;
    };
    std::vector<std::string> sin = stripped(wp_in);
    std::vector<std::string> sout = stripped(wp_out);

    std::string in_concat, out_concat;
    for (const auto& t : in_toks) in_concat += t;
    for (const auto& t : sout) out_concat += t;

    auto is_tail_s = [](const std::string& t) { return t == "s" || t == "'s"; };

    bool e3 = !out_toks.empty() &&
              out_toks.front().find('\n') != std::string::npos &&
              in_concat.find('\n') == std::string::npos;

    bool e2 = in_toks.size() == 1 && !in_toks[0].empty() && in_toks[0][0] == ' ' &&
              out_toks.size() == 2 && is_pure_whitespace(out_toks[0]) &&
              (out_toks[1] == in_toks[0] /* reattachment */ ||
               out_toks[1] == in_toks[0].substr(1) /* detachment */);

    bool e1 = in_toks.size() == 1 && out_toks.size() == 1 &&
              in_toks[0] != out_toks[0] && !sin.empty() && !sout.empty() &&
              sin[0] == sout[0];

    bool all_caps = word.size() >= 2 && detail::all_uppercase_letters(word);
    bool e7 = all_caps && sout.size() >= 2;
    if (e7)
        for (const auto& t : sout)
            if (!detail::all_uppercase_letters(t)) { e7 = false; break; }

    bool e8 = false;
    if (sout.size() >= 2 && (is_tail_s(sout.back()) || sout.front() == "s"))
        e8 = true;
    if (!e8 && sin.size() >= 2 && is_tail_s(sin.back()) && !word.empty() &&
        word.back() == 's' && (sout.empty() || !is_tail_s(sout.back())))
        e8 = true; // trailing s merged into a new tail token

    bool capitalized = false;
    for (unsigned char c : word) {
        if (std::isalpha(c)) { capitalized = std::isupper(c) != 0; break; }
    }
    bool e5 = capitalized && !all_caps &&
              detail::cut_points(sin) != detail::cut_points(sout);

    bool e6 = sout.size() == 2 &&
              (affixes.count(sout.front()) > 0 || affixes.count(sout.back()) > 0);

    bool e4 = sin.size() == 1 && sout.size() >= 2 && out_concat == word;

    TaxonomyResult res;
    res.fired_mask = (e1 ? 1u : 0u) | (e2 ? 1u << 1 : 0u) | (e3 ? 1u << 2 : 0u) |
                     (e4 ? 1u << 3 : 0u) | (e5 ? 1u << 4 : 0u) | (e6 ? 1u << 5 : 0u) |
                     (e7 ? 1u << 6 : 0u) | (e8 ? 1u << 7 : 0u);
    if (e3) res.type = ErrorType::E3_NewlineSubstitution;
    else if (e2) res.type = ErrorType::E2_WhitespaceDetachReattach;
    else if (e1) res.type = ErrorType::E1_WhitespaceBoundaryShift;
    else if (e7) res.type = ErrorType::E7_AcronymSplit;
    else if (e8) res.type = ErrorType::E8_PluralPossessiveTail;
    else if (e5) res.type = ErrorType::E5_ProperNounSegmentation;
    else if (e6) res.type = ErrorType::E6_MorphologicalSurfacing;
    else if (e4) res.type = ErrorType::E4_IntraWordResegmentation;
    else res.type = ErrorType::Other;
    return res;
}

} // namespace phantom
