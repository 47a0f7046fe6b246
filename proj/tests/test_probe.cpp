#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace phantom;

TEST_CASE("word splitting tracks cores without trailing punctuation") {
    auto words = split_words("  Hello, world.\nBye ");
    REQUIRE(words.size() == 3);
    REQUIRE(words[0].begin == 2);
    REQUIRE(words[0].end == 8);      // "Hello,"
    REQUIRE(words[0].core_end == 7); // "Hello"
    REQUIRE(words[1].core_end - words[1].core_begin == 5);
    REQUIRE(words[2].begin == 16);
    REQUIRE(word_count("one two three") == 3);
    REQUIRE(word_count("   ") == 0);
}

TEST_CASE("target selection is deterministic, sized by ceil, and skips stopwords") {
    std::string text = "the alpha of beta and gamma or delta not epsilon";
    SelectorConfig cfg;
    cfg.fraction = 0.5;
    cfg.seed = 7;
    auto t1 = select_targets(text, cfg);
    auto t2 = select_targets(text, cfg);
    REQUIRE(t1 == t2);
    // 5 eligible words (alpha..epsilon), ceil(0.5 * 5) = 3
    REQUIRE(t1.size() == 3);
    for (const auto& t : t1) {
        REQUIRE(t.word != "the");
        REQUIRE(text.substr(t.begin, t.end - t.begin) == t.word);
    }
    REQUIRE(std::is_sorted(t1.begin(), t1.end(),
                           [](const TargetSpan& a, const TargetSpan& b) {
                               return a.begin < b.begin;
                           }));

    cfg.seed = 8;
    auto t3 = select_targets(text, cfg);
    bool moved = t1.size() != t3.size() || !std::equal(t1.begin(), t1.end(), t3.begin());
    // different seeds should usually pick different subsets; with C(5,3)=10
    // subsets this specific pair must not collide for the test to stay sharp
    REQUIRE(moved);
}

TEST_CASE("selection respects word length bounds and rejects bad input") {
    std::string text = "ab abcd abcdefgh";
    SelectorConfig cfg;
    cfg.fraction = 1.0;
    cfg.min_word_chars = 3;
    cfg.max_word_chars = 5;
    auto t = select_targets(text, cfg);
    REQUIRE(t.size() == 1);
    REQUIRE(t[0].word == "abcd");

    cfg.fraction = 0.0;
    REQUIRE_THROWS_AS(select_targets(text, cfg), Error);
    cfg.fraction = 1.5;
    REQUIRE_THROWS_AS(select_targets(text, cfg), Error);
    cfg.fraction = 1.0;
    REQUIRE_THROWS_AS(select_targets("the of and", cfg), Error);
}

TEST_CASE("bracketing wraps cores and leaves punctuation outside") {
    std::string text = "keep alpha, stop beta.";
    SelectorConfig cfg;
    cfg.fraction = 1.0;
    auto targets = select_targets(text, cfg);
    REQUIRE(targets.size() == 2);
    std::string bracketed = bracket_targets(text, targets);
    REQUIRE(bracketed == "keep [alpha], stop [beta].");

    bool had = false;
    REQUIRE(strip_brackets(bracketed, &had) == text);
    REQUIRE(had);
    REQUIRE(strip_brackets(text, &had) == text);
    REQUIRE_FALSE(had);
}

TEST_CASE("prompt template substitution") {
    REQUIRE(build_prompt("DOC", "before {doc} after") == "before DOC after");
    REQUIRE_THROWS_AS(build_prompt("DOC", "no placeholder"), Error);
    std::string p = build_prompt("xyz");
    REQUIRE(p.find("xyz") != std::string::npos);
    REQUIRE(p.find("{doc}") == std::string::npos);
}

TEST_CASE("annotate_document assembles all derived fields consistently") {
    SelectorConfig cfg;
    cfg.fraction = 0.3;
    cfg.seed = 11;
    AnnotatedDoc doc = annotate_document("d1", "plain alpha beta gamma delta", cfg);
    REQUIRE(doc.doc_id == "d1");
    REQUIRE(strip_brackets(doc.bracketed_text) == doc.original_text);
    REQUIRE(doc.prompt.find(doc.bracketed_text) != std::string::npos);
    for (const auto& t : doc.targets)
        REQUIRE(doc.original_text.substr(t.begin, t.end - t.begin) == t.word);
}

TEST_CASE("corpus length filter is inclusive on both bounds") {
    auto words = [](std::size_t n) {
        std::string s;
        for (std::size_t i = 0; i < n; ++i) s += "w ";
        return s;
    };
    REQUIRE_FALSE(passes_corpus_filter(words(99)));
    REQUIRE(passes_corpus_filter(words(100)));
    REQUIRE(passes_corpus_filter(words(600)));
    REQUIRE_FALSE(passes_corpus_filter(words(601)));
}

TEST_CASE("fixture corpora pass the corpus filter") {
    for (const char* name :
         {"corpus_mixed.jsonl", "corpus_words.jsonl", "corpus_transitions.jsonl"}) {
        auto docs = read_corpus(data_path(name));
        REQUIRE(docs.size() >= 500);
        for (const auto& d : docs) REQUIRE(passes_corpus_filter(d.text));
    }
}

TEST_CASE("stopword list loads from file and matches case-insensitively") {
    auto sw = load_stopwords(data_path("stopwords.txt"));
    REQUIRE(is_stopword(sw, "the"));
    REQUIRE(is_stopword(sw, "The"));
    REQUIRE_FALSE(is_stopword(sw, "February"));
    REQUIRE(is_stopword(default_stopwords(), "and"));
}
