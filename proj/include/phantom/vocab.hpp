#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "phantom/error.hpp"
#include "phantom/text.hpp"

namespace phantom {

using TokenId = std::uint32_t;

struct ByteRange {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;

    bool operator==(const ByteRange&) const = default;
    std::uint32_t size() const { return end - begin; }
};

// Token-ID sequence plus per-token byte offsets tiling the source text.
struct Encoding {
    std::vector<TokenId> ids;
    std::vector<ByteRange> offsets;
};

enum class VocabMode { ByteLevel, Metaspace };

// GPT-2 byte <-> printable-unicode convention used by standard vocab files.
// Printable bytes map to themselves; the rest shift into 0x100+n codepoints.
namespace detail {

inline const std::vector<std::string>& byte_to_unicode_table() {
    static const std::vector<std::string> table = [] {
        std::vector<int> cps(256, -1);
        auto printable = [](int b) {
            return (b >= '!' && b <= '~') || (b >= 0xA1 && b <= 0xAC) ||
                   (b >= 0xAE && b <= 0xFF);
        };
        int n = 0;
        for (int b = 0; b < 256; ++b) {
            if (printable(b)) cps[b] = b;
            else cps[b] = 256 + n++;
        }
        auto encode_utf8 = [](int cp) {
            std::string out;
            if (cp < 0x80) {
                out.push_back(static_cast<char>(cp));
            } else if (cp < 0x800) {
                out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
                out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            } else {
                out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
                out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            }
            return out;
        };
        std::vector<std::string> t(256);
        for (int b = 0; b < 256; ++b) t[b] = encode_utf8(cps[b]);
        return t;
    }();
    return table;
}

inline const std::unordered_map<std::string, unsigned char>& unicode_to_byte_table() {
    static const std::unordered_map<std::string, unsigned char> table = [] {
        std::unordered_map<std::string, unsigned char> t;
        const auto& fwd = byte_to_unicode_table();
        for (int b = 0; b < 256; ++b) t[fwd[b]] = static_cast<unsigned char>(b);
        return t;
    }();
    return table;
}

} // namespace detail

inline std::string bytes_to_printable(std::string_view raw) {
    const auto& table = detail::byte_to_unicode_table();
    std::string out;
    for (unsigned char c : raw) out += table[c];
    return out;
}

inline std::string printable_to_bytes(const std::string& printable) {
    const auto& table = detail::unicode_to_byte_table();
    std::string out;
    std::size_t i = 0;
    while (i < printable.size()) {
        unsigned char lead = static_cast<unsigned char>(printable[i]);
        std::size_t len = lead < 0x80 ? 1 : (lead < 0xE0 ? 2 : (lead < 0xF0 ? 3 : 4));
        if (i + len > printable.size())
            throw data_error("truncated UTF-8 in vocabulary entry");
        auto it = table.find(printable.substr(i, len));
        if (it == table.end())
            throw data_error("character outside the printable-unicode byte alphabet: '" +
                             printable.substr(i, len) + "'");
        out.push_back(static_cast<char>(it->second));
        i += len;
    }
    return out;
}

inline constexpr std::string_view kMetaspaceMarker = "\xE2\x96\x81"; // U+2581

// Byte-keyed trie over token strings; read-only after construction.
class TokenTrie {
public:
    void insert(std::string_view token, TokenId id) {
        int node = 0;
        if (nodes_.empty()) nodes_.emplace_back();
        for (unsigned char c : token) {
            auto it = nodes_[node].children.find(c);
            if (it == nodes_[node].children.end()) {
                nodes_.emplace_back();
                int next = static_cast<int>(nodes_.size()) - 1;
                nodes_[node].children.emplace(c, next);
                node = next;
            } else {
                node = it->second;
            }
        }
        nodes_[node].id = static_cast<std::int64_t>(id);
    }

    // All tokens starting at text[pos], as (length, id), shortest first.
    void matches_at(std::string_view text, std::size_t pos,
                    std::vector<std::pair<std::uint32_t, TokenId>>& out) const {
        out.clear();
        if (nodes_.empty()) return;
        int node = 0;
        for (std::size_t i = pos; i < text.size(); ++i) {
            auto it = nodes_[node].children.find(static_cast<unsigned char>(text[i]));
            if (it == nodes_[node].children.end()) break;
            node = it->second;
            if (nodes_[node].id >= 0)
                out.emplace_back(static_cast<std::uint32_t>(i - pos + 1),
                                 static_cast<TokenId>(nodes_[node].id));
        }
    }

    // Longest token starting at text[pos], or nullopt.
    std::optional<std::pair<std::uint32_t, TokenId>>
    longest_match(std::string_view text, std::size_t pos) const {
        std::optional<std::pair<std::uint32_t, TokenId>> best;
        if (nodes_.empty()) return best;
        int node = 0;
        for (std::size_t i = pos; i < text.size(); ++i) {
            auto it = nodes_[node].children.find(static_cast<unsigned char>(text[i]));
            if (it == nodes_[node].children.end()) break;
            node = it->second;
            if (nodes_[node].id >= 0)
                best = {static_cast<std::uint32_t>(i - pos + 1),
                        static_cast<TokenId>(nodes_[node].id)};
        }
        return best;
    }

private:
    struct Node {
        std::unordered_map<unsigned char, int> children;
        std::int64_t id = -1;
    };
    std::vector<Node> nodes_;
};

// Immutable subword vocabulary. Token strings are raw bytes internally;
// the printable-unicode convention exists only at the file boundary.
class Vocabulary {
public:
    Vocabulary(std::vector<std::string> tokens,
               std::vector<std::pair<std::string, std::string>> merges,
               VocabMode mode, std::optional<bool> normalize_whitespace = std::nullopt)
        : tokens_(std::move(tokens)), mode_(mode) {
        normalize_whitespace_ =
            normalize_whitespace.value_or(mode_ == VocabMode::Metaspace);
        for (std::size_t i = 0; i < tokens_.size(); ++i) {
            auto [it, inserted] = token_to_id_.emplace(tokens_[i], static_cast<TokenId>(i));
            if (!inserted)
                throw data_error("duplicate token string at id " + std::to_string(i) +
                                 ": '" + bytes_to_printable(tokens_[i]) + "'");
            trie_.insert(tokens_[i], static_cast<TokenId>(i));
        }
        if (mode_ == VocabMode::ByteLevel) {
            for (int b = 0; b < 256; ++b) {
                std::string s(1, static_cast<char>(b));
                if (!token_to_id_.count(s))
                    throw data_error("byte-level mode missing byte fallback token for byte " +
                                     std::to_string(b));
            }
        }
        for (std::size_t r = 0; r < merges.size(); ++r) {
            const auto& [left, right] = merges[r];
            if (!token_to_id_.count(left) || !token_to_id_.count(right) ||
                !token_to_id_.count(left + right))
                throw data_error("merge rank " + std::to_string(r) +
                                 " references tokens outside the vocabulary");
            merge_rank_.emplace(left + '\0' + right, static_cast<std::uint32_t>(r));
        }
        merges_ = std::move(merges);
    }

    std::size_t size() const { return tokens_.size(); }
    VocabMode mode() const { return mode_; }
    bool normalize_whitespace() const { return normalize_whitespace_; }
    bool has_merges() const { return !merges_.empty(); }
    const TokenTrie& trie() const { return trie_; }

    const std::string& token(TokenId id) const {
        check_id(id);
        return tokens_[id];
    }

    std::optional<TokenId> find(std::string_view token) const {
        auto it = token_to_id_.find(std::string(token));
        return it == token_to_id_.end() ? std::nullopt : std::make_optional(it->second);
    }

    bool valid_id(TokenId id) const { return id < tokens_.size(); }

    void check_id(TokenId id) const {
        if (!valid_id(id))
            throw data_error("token id out of range: " + std::to_string(id) +
                             " (vocabulary size " + std::to_string(tokens_.size()) + ")");
    }

    // ---- encode -------------------------------------------------------

    Encoding encode(std::string_view text) const {
        if (mode_ == VocabMode::Metaspace) return encode_metaspace(text);
        return has_merges() ? encode_bpe(text) : encode_greedy(text);
    }

    // ---- decode -------------------------------------------------------

    std::string decode(const std::vector<TokenId>& ids) const {
        std::string out;
        for (TokenId id : ids) {
            check_id(id);
            out += tokens_[id];
        }
        if (mode_ == VocabMode::Metaspace) {
            std::string mapped;
            std::size_t i = 0;
            while (i < out.size()) {
                if (out.compare(i, kMetaspaceMarker.size(), kMetaspaceMarker) == 0) {
                    mapped.push_back(' ');
                    i += kMetaspaceMarker.size();
                } else {
                    mapped.push_back(out[i]);
                    ++i;
                }
            }
            if (normalize_whitespace_ && !mapped.empty() && mapped.front() == ' ')
                mapped.erase(mapped.begin());
            return mapped;
        }
        return out;
    }

    // Surface comparison under the vocabulary's convention: when whitespace
    // normalization is on, leading whitespace is dropped and interior runs
    // collapse to a single space.
    std::string normalize_surface(std::string_view s) const {
        if (!normalize_whitespace_) return std::string(s);
        std::string out;
        bool pending_space = false;
        for (unsigned char c : s) {
            if (is_ascii_space(c)) {
                if (!out.empty()) pending_space = true;
            } else {
                if (pending_space) out.push_back(' ');
                pending_space = false;
                out.push_back(static_cast<char>(c));
            }
        }
        return out;
    }

    bool surfaces_equivalent(std::string_view a, std::string_view b) const {
        return normalize_surface(a) == normalize_surface(b);
    }

private:
    Encoding encode_greedy(std::string_view text) const {
        Encoding enc;
        std::size_t pos = 0;
        while (pos < text.size()) {
            auto m = trie_.longest_match(text, pos);
            if (!m)
                throw data_error("unencodable text at byte " + std::to_string(pos));
            enc.ids.push_back(m->second);
            enc.offsets.push_back({static_cast<std::uint32_t>(pos),
                                   static_cast<std::uint32_t>(pos + m->first)});
            pos += m->first;
        }
        return enc;
    }

    Encoding encode_bpe(std::string_view text) const {
        struct Symbol {
            std::string piece;
            ByteRange range;
        };
        std::vector<Symbol> symbols;
        symbols.reserve(text.size());
        for (std::size_t i = 0; i < text.size(); ++i)
            symbols.push_back({std::string(1, text[i]),
                               {static_cast<std::uint32_t>(i),
                                static_cast<std::uint32_t>(i + 1)}});
        while (symbols.size() > 1) {
            std::uint32_t best_rank = std::numeric_limits<std::uint32_t>::max();
            for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
                auto it = merge_rank_.find(symbols[i].piece + '\0' + symbols[i + 1].piece);
                if (it != merge_rank_.end() && it->second < best_rank)
                    best_rank = it->second;
            }
            if (best_rank == std::numeric_limits<std::uint32_t>::max()) break;
            const auto& [left, right] = merges_[best_rank];
            std::vector<Symbol> next;
            next.reserve(symbols.size());
            std::size_t i = 0;
            while (i < symbols.size()) {
                if (i + 1 < symbols.size() && symbols[i].piece == left &&
                    symbols[i + 1].piece == right) {
                    next.push_back({left + right,
                                    {symbols[i].range.begin, symbols[i + 1].range.end}});
                    i += 2;
                } else {
                    next.push_back(std::move(symbols[i]));
                    ++i;
                }
            }
            symbols = std::move(next);
        }
        Encoding enc;
        for (auto& s : symbols) {
            auto id = find(s.piece);
            if (!id)
                throw data_error("BPE produced a piece outside the vocabulary");
            enc.ids.push_back(*id);
            enc.offsets.push_back(s.range);
        }
        return enc;
    }

    Encoding encode_metaspace(std::string_view text) const {
        if (text.find(kMetaspaceMarker) != std::string_view::npos)
            throw data_error("metaspace-mode text must not contain the marker character");
        // Transformed text with a map back to source byte indices. A marker's
        // three bytes all point at the single source space byte.
        std::string transformed;
        std::vector<std::uint32_t> src_index;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == ' ') {
                transformed += kMetaspaceMarker;
                for (std::size_t k = 0; k < kMetaspaceMarker.size(); ++k)
                    src_index.push_back(static_cast<std::uint32_t>(i));
            } else {
                transformed.push_back(text[i]);
                src_index.push_back(static_cast<std::uint32_t>(i));
            }
        }
        src_index.push_back(static_cast<std::uint32_t>(text.size()));
        Encoding enc;
        std::size_t pos = 0;
        while (pos < transformed.size()) {
            auto m = trie_.longest_match(transformed, pos);
            if (!m)
                throw data_error("unencodable text at byte " +
                                 std::to_string(src_index[pos]));
            enc.ids.push_back(m->second);
            enc.offsets.push_back({src_index[pos], src_index[pos + m->first]});
            pos += m->first;
        }
        return enc;
    }

    std::vector<std::string> tokens_;
    std::vector<std::pair<std::string, std::string>> merges_;
    std::unordered_map<std::string, TokenId> token_to_id_;
    std::unordered_map<std::string, std::uint32_t> merge_rank_;
    TokenTrie trie_;
    VocabMode mode_;
    bool normalize_whitespace_;
};

// ---- loaders ----------------------------------------------------------

inline VocabMode parse_mode(const std::string& s) {
    if (s == "byte_level" || s == "byte-level") return VocabMode::ByteLevel;
    if (s == "metaspace") return VocabMode::Metaspace;
    throw data_error("unknown vocabulary mode: '" + s + "'");
}

inline Vocabulary load_vocabulary(const std::string& path,
                                  std::optional<VocabMode> mode_override = std::nullopt,
                                  std::optional<bool> normalize_override = std::nullopt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open vocabulary file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("vocabulary parse failure in " + path + ": " + e.what());
    }
    if (!j.contains("tokens") || !j["tokens"].is_array())
        throw data_error("vocabulary file missing \"tokens\" array: " + path);
    VocabMode mode = mode_override.value_or(
        parse_mode(j.value("mode", std::string("byte_level"))));
    std::optional<bool> normalize = normalize_override;
    if (!normalize && j.contains("normalize_whitespace"))
        normalize = j["normalize_whitespace"].get<bool>();

    std::vector<std::string> tokens;
    tokens.reserve(j["tokens"].size());
    for (const auto& t : j["tokens"]) {
        std::string s = t.get<std::string>();
        tokens.push_back(mode == VocabMode::ByteLevel ? printable_to_bytes(s) : s);
    }
    std::vector<std::pair<std::string, std::string>> merges;
    if (j.contains("merges")) {
        for (const auto& m : j["merges"]) {
            std::string line = m.get<std::string>();
            auto sp = line.find(' ');
            if (sp == std::string::npos)
                throw data_error("malformed merge entry: '" + line + "'");
            std::string left = line.substr(0, sp), right = line.substr(sp + 1);
            if (mode == VocabMode::ByteLevel) {
                left = printable_to_bytes(left);
                right = printable_to_bytes(right);
            }
            merges.emplace_back(left, right);
        }
    }
    return Vocabulary(std::move(tokens), std::move(merges), mode, normalize);
}

// Standard two-file layout: vocab.json maps token string -> id, merges.txt one
// "left right" pair per line (optional "#version" header). Byte-level only.
inline Vocabulary load_vocab_merges(const std::string& vocab_path,
                                    const std::string& merges_path,
                                    std::optional<bool> normalize_override = std::nullopt) {
    std::ifstream in(vocab_path, std::ios::binary);
    if (!in) throw data_error("cannot open vocab file: " + vocab_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("vocab parse failure in " + vocab_path + ": " + e.what());
    }
    std::vector<std::string> tokens(j.size());
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto id = it.value().get<std::size_t>();
        if (id >= tokens.size())
            throw data_error("vocab ids are not dense 0..V-1 in " + vocab_path);
        tokens[id] = printable_to_bytes(it.key());
    }
    std::vector<std::pair<std::string, std::string>> merges;
    std::ifstream min(merges_path, std::ios::binary);
    if (!min) throw data_error("cannot open merges file: " + merges_path);
    std::string line;
    while (std::getline(min, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto sp = line.find(' ');
        if (sp == std::string::npos)
            throw data_error("malformed merge line: '" + line + "'");
        merges.emplace_back(printable_to_bytes(line.substr(0, sp)),
                            printable_to_bytes(line.substr(sp + 1)));
    }
    return Vocabulary(std::move(tokens), std::move(merges), VocabMode::ByteLevel,
                      normalize_override);
}

} // namespace phantom
