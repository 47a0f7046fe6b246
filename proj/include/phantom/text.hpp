#pragma once

#include <string_view>

namespace phantom {

inline bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_pure_whitespace(std::string_view s) {
    if (s.empty()) return false;
    for (unsigned char c : s)
        if (!is_ascii_space(c)) return false;
    return true;
}

} // namespace phantom
