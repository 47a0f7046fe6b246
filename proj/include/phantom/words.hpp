#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "phantom/text.hpp"

namespace phantom {

// A maximal non-whitespace run, plus the "core" word with trailing ASCII
// punctuation stripped (bracket placement must not swallow punctuation).
struct WordSpan {
    std::uint32_t begin = 0;      // run start
    std::uint32_t end = 0;        // run end (exclusive)
    std::uint32_t core_begin = 0; // core word start
    std::uint32_t core_end = 0;   // core word end (exclusive)
};

inline bool is_ascii_punct(unsigned char c) {
    return c < 0x80 && std::ispunct(c);
}

inline std::vector<WordSpan> split_words(std::string_view text) {
    std::vector<WordSpan> words;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_ascii_space(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        std::size_t start = i;
        while (i < text.size() && !is_ascii_space(static_cast<unsigned char>(text[i]))) ++i;
        WordSpan w;
        w.begin = static_cast<std::uint32_t>(start);
        w.end = static_cast<std::uint32_t>(i);
        std::size_t core_end = i;
        while (core_end > start && is_ascii_punct(static_cast<unsigned char>(text[core_end - 1])))
            --core_end;
        w.core_begin = w.begin;
        w.core_end = static_cast<std::uint32_t>(core_end);
        words.push_back(w);
    }
    return words;
}

inline std::size_t word_count(std::string_view text) {
    return split_words(text).size();
}

inline std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace phantom
