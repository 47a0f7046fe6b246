#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace phantom;

namespace {

// Annotate `text` with the word indices in `which` as targets.
AnnotatedDoc make_doc(const std::string& text, std::vector<std::size_t> which,
                      const std::string& id = "doc") {
    AnnotatedDoc doc;
    doc.doc_id = id;
    doc.original_text = text;
    auto words = split_words(text);
    for (std::size_t w : which) {
        const WordSpan& s = words.at(w);
        doc.targets.push_back({s.core_begin, s.core_end,
                               text.substr(s.core_begin, s.core_end - s.core_begin)});
    }
    doc.bracketed_text = bracket_targets(text, doc.targets);
    doc.prompt = build_prompt(doc.bracketed_text);
    return doc;
}

std::vector<std::string> token_strings(const Vocabulary& v, const std::vector<TokenId>& ids) {
    std::vector<std::string> out;
    for (TokenId id : ids) out.push_back(v.token(id));
    return out;
}

std::vector<TokenId> ids_of(const Vocabulary& v, const std::vector<std::string>& toks) {
    std::vector<TokenId> out;
    for (const auto& t : toks) {
        auto id = v.find(t);
        REQUIRE(id.has_value());
        out.push_back(*id);
    }
    return out;
}

} // namespace

TEST_CASE("extract_token_span returns the minimal covering subsequence") {
    const Vocabulary& v = toy_vocab();
    std::string text = "the Jubilee day";
    Encoding enc = v.encode(text);
    // span of "Jubilee" (bytes 4..11): gap byte 3 not included
    auto span = extract_token_span(enc, {4, 11});
    std::string joined;
    for (TokenId id : span) joined += v.token(id);
    REQUIRE(joined.find("Jub") != std::string::npos);
    REQUIRE(v.decode(span).find("Jubilee") != std::string::npos);
    // extended span includes the gap
    auto ext = extract_token_span(enc, {3, 11});
    REQUIRE(v.decode(ext) == " Jubilee");
    REQUIRE_THROWS_AS(extract_token_span(enc, {4, 999}), Error);
}

TEST_CASE("assign_offsets on an exact tiling") {
    const Vocabulary& v = toy_vocab();
    std::string text = "the smooth Guy";
    Encoding canonical = v.encode(text);
    Encoding assigned = assign_offsets(v, canonical.ids, text);
    REQUIRE(assigned.offsets == canonical.offsets);
}

TEST_CASE("assign_offsets absorbs a dropped space under normalization") {
    const Vocabulary& v = toy_vocab();
    // ids decode to "the" + "Guy" but the text keeps the space: the "Guy"
    // token absorbs it (the detokenization-drop artifact)
    auto the_id = v.encode("the").ids;
    std::vector<TokenId> ids = the_id;
    auto guy = v.find("Guy");
    REQUIRE(guy.has_value());
    ids.push_back(*guy);
    Encoding enc = assign_offsets(v, ids, "the Guy");
    REQUIRE(enc.offsets.back().begin == 3); // space byte included
    REQUIRE(enc.offsets.back().end == 7);
}

TEST_CASE("assign_offsets sheds a leading space the text lacks") {
    const Vocabulary& v = toy_vocab();
    auto id = v.find(" Guy");
    REQUIRE(id.has_value());
    Encoding enc = assign_offsets(v, {*id}, "Guy");
    REQUIRE(enc.offsets[0].begin == 0);
    REQUIRE(enc.offsets[0].end == 3);
}

TEST_CASE("assign_offsets rejects ids that do not spell the text") {
    const Vocabulary& v = toy_vocab();
    auto guy = v.find("Guy");
    REQUIRE_THROWS_AS(assign_offsets(v, {*guy}, "Gal"), Error);
    REQUIRE_THROWS_AS(assign_offsets(v, {*guy}, "Guy Guy"), Error);
}

TEST_CASE("alignment maps every target when the output is unchanged") {
    std::string text = "alpha February beta Saturday gamma";
    AnnotatedDoc doc = make_doc(text, {1, 3});
    auto regions = align(doc, text);
    REQUIRE(regions.size() == 2);
    for (const auto& r : regions) REQUIRE_FALSE(r.discarded);
    REQUIRE(text.substr(regions[0].word_range.begin,
                        regions[0].word_range.end - regions[0].word_range.begin) ==
            "February");
    // extended span starts at the end of the previous word
    REQUIRE(regions[0].extended.begin == 5);
    REQUIRE(regions[1].extended.begin == 19);
}

TEST_CASE("alignment tracks a replaced word and a multi-word replacement") {
    std::string text = "alpha February beta";
    AnnotatedDoc doc = make_doc(text, {1});

    auto one = align(doc, "alpha March beta");
    REQUIRE(one.size() == 1);
    REQUIRE_FALSE(one[0].discarded);
    std::string out1 = "alpha March beta";
    REQUIRE(out1.substr(one[0].word_range.begin,
                        one[0].word_range.end - one[0].word_range.begin) == "March");

    std::string out2 = "alpha early March beta";
    auto two = align(doc, out2);
    REQUIRE(two.size() == 1);
    REQUIRE_FALSE(two[0].discarded);
    REQUIRE(out2.substr(two[0].word_range.begin,
                        two[0].word_range.end - two[0].word_range.begin) ==
            "early March");
}

TEST_CASE("adjacent targets align one-to-one only when counts agree") {
    std::string text = "alpha February Saturday beta";
    AnnotatedDoc doc = make_doc(text, {1, 2});

    auto ok = align(doc, "alpha March Sunday beta");
    REQUIRE(ok.size() == 2);
    REQUIRE_FALSE(ok[0].discarded);
    REQUIRE_FALSE(ok[1].discarded);

    // two targets, three replacement words: attribution is ambiguous
    auto bad = align(doc, "alpha one two three beta");
    REQUIRE(bad.size() == 2);
    REQUIRE(bad[0].discarded);
    REQUIRE(bad[1].discarded);

    // deletion of the run
    auto gone = align(doc, "alpha beta");
    REQUIRE(gone[0].discarded);
    REQUIRE(gone[1].discarded);
}

TEST_CASE("a corrupted anchor discards only its region") {
    std::string text = "alpha February beta Saturday gamma";
    AnnotatedDoc doc = make_doc(text, {1, 3});
    // "gamma" (right flank of target 1) rewritten: only that target suffers
    auto regions = align(doc, "alpha February beta Saturday DAMAGE");
    REQUIRE(regions.size() == 2);
    REQUIRE_FALSE(regions[0].discarded);
    REQUIRE(regions[1].discarded);

    // now damage the shared middle anchor
    auto regions2 = align(doc, "alpha February DAMAGE Saturday gamma");
    REQUIRE(regions2[0].discarded);
    REQUIRE(regions2[1].discarded);
}

TEST_CASE("classify_document labels unchanged, replaced, and different") {
    const Vocabulary& v = toy_vocab();
    std::string text = "the February plan";
    AnnotatedDoc doc = make_doc(text, {1});
    Encoding input_enc = v.encode(text);

    SECTION("verbatim output is unchanged") {
        Encoding out_enc = v.encode(text);
        auto trials = classify_document(v, doc, text, input_enc, out_enc);
        REQUIRE(trials.size() == 1);
        REQUIRE(trials[0].outcome == Outcome::Unchanged);
        REQUIRE(trials[0].input_span_ids == ids_of(v, {" February"}));
    }

    SECTION("surface change is replaced") {
        std::string out = "the Saturday plan";
        auto trials = classify_document(v, doc, out, input_enc, v.encode(out));
        REQUIRE(trials[0].outcome == Outcome::Replaced);
        REQUIRE(trials[0].output_surface == "Saturday");
    }

    SECTION("same surface with different ids is the phantom case") {
        std::vector<TokenId> ids = v.encode("the").ids;
        for (TokenId id : ids_of(v, {" ", "February"})) ids.push_back(id);
        for (TokenId id : v.encode(" plan").ids) ids.push_back(id);
        Encoding out_enc = assign_offsets(v, ids, text);
        auto trials = classify_document(v, doc, text, input_enc, out_enc);
        REQUIRE(trials[0].outcome == Outcome::Different);
        REQUIRE(token_strings(v, trials[0].output_span_ids) ==
                std::vector<std::string>{" ", "February"});
    }
}

TEST_CASE("trailing punctuation stays out of the compared surface") {
    const Vocabulary& v = toy_vocab();
    std::string text = "see February, then";
    AnnotatedDoc doc = make_doc(text, {1});
    REQUIRE(doc.targets[0].word == "February");
    Encoding input_enc = v.encode(text);
    auto trials = classify_document(v, doc, text, input_enc, v.encode(text));
    REQUIRE(trials[0].outcome == Outcome::Unchanged);
    REQUIRE(trials[0].output_surface == "February");
}

TEST_CASE("discarded trials carry input spans but no output attribution") {
    const Vocabulary& v = toy_vocab();
    std::string text = "one February two";
    AnnotatedDoc doc = make_doc(text, {1});
    std::string out = "rewritten from scratch entirely";
    auto trials = classify_document(v, doc, out, v.encode(text), v.encode(out));
    REQUIRE(trials.size() == 1);
    REQUIRE(trials[0].outcome == Outcome::Discarded);
    REQUIRE_FALSE(trials[0].input_span_ids.empty());
    REQUIRE(trials[0].output_span_ids.empty());
}
