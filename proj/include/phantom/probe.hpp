#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "phantom/error.hpp"
#include "phantom/rng.hpp"
#include "phantom/stopwords.hpp"
#include "phantom/words.hpp"

namespace phantom {

struct TargetSpan {
    std::uint32_t begin = 0; // core word start, byte offset into original_text
    std::uint32_t end = 0;   // core word end (exclusive)
    std::string word;

    bool operator==(const TargetSpan&) const = default;
};

struct AnnotatedDoc {
    std::string doc_id;
    std::string original_text;
    std::vector<TargetSpan> targets;
    std::string bracketed_text;
    std::string prompt;
};

struct SelectorConfig {
    double fraction = 0.05;
    std::uint32_t min_word_chars = 0;  // 0 = unrestricted
    std::uint32_t max_word_chars = 0;  // 0 = unrestricted
    std::uint64_t seed = 0;
};

inline constexpr std::string_view kDocPlaceholder = "{doc}";

inline constexpr std::string_view kDefaultPromptTemplate =
    "Replace every word enclosed in square brackets with a different word of "
    "similar meaning. Keep all other text exactly as it is, including spacing "
    "and punctuation. Output the full document with the replacements applied "
    "and the brackets removed.\n\n{doc}";

// Uniform sample without replacement of ceil(fraction * eligible) eligible
// words (non-stopword, length within range). Deterministic given seed.
inline std::vector<TargetSpan>
select_targets(std::string_view text, const SelectorConfig& cfg,
               const std::unordered_set<std::string>& stopwords = default_stopwords()) {
    if (cfg.fraction <= 0.0 || cfg.fraction > 1.0)
        throw usage_error("selection fraction must be in (0, 1]");
    std::vector<TargetSpan> eligible;
    for (const WordSpan& w : split_words(text)) {
        if (w.core_end <= w.core_begin) continue;
        std::string core(text.substr(w.core_begin, w.core_end - w.core_begin));
        std::uint32_t chars = static_cast<std::uint32_t>(core.size());
        if (cfg.min_word_chars && chars < cfg.min_word_chars) continue;
        if (cfg.max_word_chars && chars > cfg.max_word_chars) continue;
        if (is_stopword(stopwords, core)) continue;
        eligible.push_back({w.core_begin, w.core_end, std::move(core)});
    }
    if (eligible.empty()) throw data_error("no eligible target words in document");

    std::size_t k = static_cast<std::size_t>(
        std::ceil(cfg.fraction * static_cast<double>(eligible.size())));
    k = std::min(k, eligible.size());

    std::vector<std::size_t> order(eligible.size());
    std::iota(order.begin(), order.end(), 0);
    DetRng rng(cfg.seed);
    rng.shuffle(order);
    order.resize(k);
    std::sort(order.begin(), order.end());

    std::vector<TargetSpan> out;
    out.reserve(k);
    for (std::size_t i : order) out.push_back(eligible[i]);
    return out;
}

inline std::string bracket_targets(std::string_view text,
                                   const std::vector<TargetSpan>& targets) {
    std::string out;
    out.reserve(text.size() + 2 * targets.size());
    std::size_t pos = 0;
    for (const auto& t : targets) {
        out += text.substr(pos, t.begin - pos);
        out += '[';
        out += text.substr(t.begin, t.end - t.begin);
        out += ']';
        pos = t.end;
    }
    out += text.substr(pos);
    return out;
}

// Removes all bracket characters; reports whether any were present.
inline std::string strip_brackets(std::string_view text, bool* had_brackets = nullptr) {
    std::string out;
    out.reserve(text.size());
    bool seen = false;
    for (char c : text) {
        if (c == '[' || c == ']') { seen = true; continue; }
        out.push_back(c);
    }
    if (had_brackets) *had_brackets = seen;
    return out;
}

inline std::string build_prompt(std::string_view bracketed_text,
                                std::string_view tmpl = kDefaultPromptTemplate) {
    auto pos = tmpl.find(kDocPlaceholder);
    if (pos == std::string_view::npos)
        throw usage_error("prompt template is missing the {doc} placeholder");
    std::string out(tmpl.substr(0, pos));
    out += bracketed_text;
    out += tmpl.substr(pos + kDocPlaceholder.size());
    return out;
}

inline AnnotatedDoc
annotate_document(std::string doc_id, std::string text, const SelectorConfig& cfg,
                  const std::unordered_set<std::string>& stopwords = default_stopwords(),
                  std::string_view tmpl = kDefaultPromptTemplate) {
    AnnotatedDoc doc;
    doc.doc_id = std::move(doc_id);
    doc.original_text = std::move(text);
    doc.targets = select_targets(doc.original_text, cfg, stopwords);
    doc.bracketed_text = bracket_targets(doc.original_text, doc.targets);
    doc.prompt = build_prompt(doc.bracketed_text, tmpl);
    return doc;
}

struct CorpusBounds {
    std::size_t min_words = 100;
    std::size_t max_words = 600; // both bounds inclusive
};

inline bool passes_corpus_filter(std::string_view text, const CorpusBounds& bounds = {}) {
    std::size_t w = word_count(text);
    return w >= bounds.min_words && w <= bounds.max_words;
}

} // namespace phantom
