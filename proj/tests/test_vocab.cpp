#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace phantom;

namespace {

std::vector<std::string> token_strings(const Vocabulary& v, const std::vector<TokenId>& ids) {
    std::vector<std::string> out;
    for (TokenId id : ids) out.push_back(v.token(id));
    return out;
}

} // namespace

TEST_CASE("byte/printable mapping round-trips all 256 bytes") {
    std::string raw;
    for (int b = 0; b < 256; ++b) raw.push_back(static_cast<char>(b));
    std::string printable = bytes_to_printable(raw);
    REQUIRE(printable_to_bytes(printable) == raw);
    // the printable form must itself be valid UTF-8 made of mapped chars only
    REQUIRE(printable.find(' ') == std::string::npos);
}

TEST_CASE("printable decoding rejects characters outside the alphabet") {
    REQUIRE_THROWS_AS(printable_to_bytes(" "), Error);
    REQUIRE_THROWS_AS(printable_to_bytes("\xE2"), Error); // truncated UTF-8
}

TEST_CASE("toy vocabulary loads with byte fallback and settings") {
    const Vocabulary& v = toy_vocab();
    REQUIRE(v.size() > 256);
    REQUIRE(v.mode() == VocabMode::ByteLevel);
    REQUIRE(v.normalize_whitespace());
    for (int b = 0; b < 256; ++b)
        REQUIRE(v.find(std::string(1, static_cast<char>(b))).has_value());
}

TEST_CASE("construction rejects duplicates, missing byte coverage, bad merges") {
    auto bytes = all_byte_tokens();

    auto dup = bytes;
    dup.push_back("ab");
    dup.push_back("ab");
    REQUIRE_THROWS_AS(Vocabulary(dup, {}, VocabMode::ByteLevel), Error);

    std::vector<std::string> incomplete(bytes.begin(), bytes.end() - 1);
    REQUIRE_THROWS_AS(Vocabulary(incomplete, {}, VocabMode::ByteLevel), Error);

    auto with_pair = bytes;
    with_pair.push_back("ab");
    REQUIRE_THROWS_AS(
        Vocabulary(with_pair, {{"a", "c"}}, VocabMode::ByteLevel), Error);
    REQUIRE_NOTHROW(Vocabulary(with_pair, {{"a", "b"}}, VocabMode::ByteLevel));
}

TEST_CASE("canonical encodings of known words") {
    const Vocabulary& v = toy_vocab();
    REQUIRE(token_strings(v, v.encode(" February").ids) ==
            std::vector<std::string>{" February"});
    REQUIRE(token_strings(v, v.encode(" Jubilee").ids) ==
            std::vector<std::string>{" Jub", "ilee"});
    REQUIRE(token_strings(v, v.encode(" Dormer").ids) ==
            std::vector<std::string>{" Dorm", "er"});
    REQUIRE(token_strings(v, v.encode(" Clements").ids) ==
            std::vector<std::string>{" Clement", "s"});
    REQUIRE(token_strings(v, v.encode(" unbelievable").ids) ==
            std::vector<std::string>{" unbelievable"});
}

TEST_CASE("encode offsets tile the input text exactly") {
    const Vocabulary& v = toy_vocab();
    for (const std::string& s : lexicon_surfaces()) {
        Encoding enc = v.encode(s);
        REQUIRE(enc.ids.size() == enc.offsets.size());
        std::uint32_t pos = 0;
        for (const ByteRange& r : enc.offsets) {
            REQUIRE(r.begin == pos);
            REQUIRE(r.end > r.begin);
            pos = r.end;
        }
        REQUIRE(pos == s.size());
    }
}

TEST_CASE("decode is the exact inverse of encode in byte-level mode") {
    const Vocabulary& v = toy_vocab();
    for (const std::string& s : lexicon_surfaces())
        REQUIRE(v.decode(v.encode(s).ids) == s);

    DetRng rng(42);
    for (int i = 0; i < 500; ++i) {
        std::string s;
        std::size_t len = 1 + rng.bounded(64);
        for (std::size_t k = 0; k < len; ++k)
            s.push_back(static_cast<char>(rng.bounded(256)));
        REQUIRE(v.decode(v.encode(s).ids) == s);
    }
}

TEST_CASE("decode rejects out-of-range ids") {
    const Vocabulary& v = toy_vocab();
    REQUIRE_THROWS_AS(v.decode({static_cast<TokenId>(v.size())}), Error);
}

TEST_CASE("merge-rank encoding follows rank order, not greedy length") {
    auto tokens = all_byte_tokens();
    tokens.push_back("ab");
    tokens.push_back("bc");
    // greedy would take "ab" first; the merge table only ever builds "bc"
    Vocabulary greedy(tokens, {}, VocabMode::ByteLevel);
    REQUIRE(token_strings(greedy, greedy.encode("abc").ids) ==
            std::vector<std::string>{"ab", "c"});

    Vocabulary bpe(tokens, {{"b", "c"}}, VocabMode::ByteLevel);
    REQUIRE(token_strings(bpe, bpe.encode("abc").ids) ==
            std::vector<std::string>{"a", "bc"});

    // lower rank wins when both merges apply
    tokens.push_back("abc");
    Vocabulary ranked(tokens, {{"a", "b"}, {"b", "c"}, {"ab", "c"}},
                      VocabMode::ByteLevel);
    REQUIRE(token_strings(ranked, ranked.encode("abc").ids) ==
            std::vector<std::string>{"abc"});
}

TEST_CASE("metaspace mode maps the marker to spaces and back") {
    std::string m(kMetaspaceMarker);
    std::vector<std::string> tokens = {m, m + "hello", m + "world", "hello", "world",
                                       "h", "e", "l", "o", "w", "r", "d"};
    Vocabulary v(tokens, {}, VocabMode::Metaspace);
    REQUIRE(v.normalize_whitespace()); // metaspace default

    Encoding enc = v.encode("hello world");
    REQUIRE(token_strings(v, enc.ids) ==
            std::vector<std::string>{"hello", m + "world"});
    // the marker token's offsets cover the single source space byte
    REQUIRE(enc.offsets[1].begin == 5);
    REQUIRE(enc.offsets[1].end == 11);
    REQUIRE(v.decode(enc.ids) == "hello world");

    // leading marker decodes to a stripped leading space under normalization
    auto hello = v.find(m + "hello");
    REQUIRE(hello.has_value());
    REQUIRE(v.decode({*hello}) == "hello");

    REQUIRE_THROWS_AS(v.encode("has " + m + " marker"), Error);
}

TEST_CASE("surface normalization collapses whitespace when enabled") {
    const Vocabulary& v = toy_vocab();
    REQUIRE(v.normalize_surface("  a \n b ") == "a b");
    REQUIRE(v.surfaces_equivalent(" Guy", "Guy"));
    REQUIRE(v.surfaces_equivalent("a\nb", "a b"));
    REQUIRE_FALSE(v.surfaces_equivalent("ab", "a b"));

    Vocabulary strict(all_byte_tokens(), {}, VocabMode::ByteLevel, false);
    REQUIRE_FALSE(strict.surfaces_equivalent(" Guy", "Guy"));
    REQUIRE(strict.normalize_surface("  a ") == "  a ");
}

TEST_CASE("unencodable text reports the failing byte") {
    std::vector<std::string> tokens = {std::string(kMetaspaceMarker), "a"};
    Vocabulary v(tokens, {}, VocabMode::Metaspace);
    REQUIRE_THROWS_WITH(v.encode("ab"), Catch::Matchers::ContainsSubstring("byte 1"));
}

TEST_CASE("two-file vocab/merges loader") {
    std::string dir = std::filesystem::temp_directory_path().string();
    std::string vocab_path = dir + "/pp_vocab.json";
    std::string merges_path = dir + "/pp_merges.txt";
    {
        nlohmann::json j = nlohmann::json::object();
        auto bytes = all_byte_tokens();
        for (std::size_t i = 0; i < bytes.size(); ++i)
            j[bytes_to_printable(bytes[i])] = i;
        j[bytes_to_printable("ab")] = 256;
        std::ofstream(vocab_path) << j.dump();
        std::ofstream(merges_path) << "#version: 0.2\n"
                                   << bytes_to_printable("a") << " "
                                   << bytes_to_printable("b") << "\n";
    }
    Vocabulary v = load_vocab_merges(vocab_path, merges_path);
    REQUIRE(v.size() == 257);
    REQUIRE(v.has_merges());
    REQUIRE(token_strings(v, v.encode("ab").ids) == std::vector<std::string>{"ab"});
}
