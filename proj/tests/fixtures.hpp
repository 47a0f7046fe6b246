#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "phantom/phantom.hpp"

#ifndef PHANTOM_DATA_DIR
#error "PHANTOM_DATA_DIR must point at the data/ directory"
#endif

inline std::string data_path(const std::string& name) {
    return std::string(PHANTOM_DATA_DIR) + "/" + name;
}

inline const phantom::Vocabulary& toy_vocab() {
    static const phantom::Vocabulary v = phantom::load_vocabulary(data_path("toyvoc.json"));
    return v;
}

// Lexicon surfaces, one per line, leading space significant.
inline const std::vector<std::string>& lexicon_surfaces() {
    static const std::vector<std::string> surfaces = [] {
        std::ifstream in(data_path("lexicon.txt"));
        std::vector<std::string> out;
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) out.push_back(line);
        return out;
    }();
    return surfaces;
}

// Minimal byte-complete token set for hand-built vocabularies.
inline std::vector<std::string> all_byte_tokens() {
    std::vector<std::string> t;
    t.reserve(256);
    for (int b = 0; b < 256; ++b) t.push_back(std::string(1, static_cast<char>(b)));
    return t;
}
