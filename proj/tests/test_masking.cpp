#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace phantom;

namespace {

Trial diff_trial(const std::string& doc, std::uint32_t idx, std::vector<TokenId> in,
                 std::vector<TokenId> out) {
    Trial t;
    t.doc_id = doc;
    t.target_index = idx;
    t.outcome = Outcome::Different;
    t.input_span_ids = std::move(in);
    t.output_span_ids = std::move(out);
    return t;
}

} // namespace

TEST_CASE("blocklist holds output-minus-input ids with provenance") {
    std::vector<Trial> trials = {
        diff_trial("d1", 0, {10}, {20, 21}),
        diff_trial("d1", 1, {10}, {21, 22}),
        diff_trial("d2", 0, {20}, {20, 23}), // 20 in input: not blocked here
    };
    Trial replaced;
    replaced.outcome = Outcome::Replaced;
    replaced.output_span_ids = {99};
    trials.push_back(replaced);

    Blocklist bl = build_blocklist(trials);
    REQUIRE(bl.blocked_ids == std::set<TokenId>{20, 21, 22, 23});
    REQUIRE_FALSE(bl.blocks(99)); // non-Different trials contribute nothing
    REQUIRE(bl.provenance.at(21) == std::vector<std::string>{"d1#0", "d1#1"});
    REQUIRE(bl.provenance.at(20) == std::vector<std::string>{"d1#0"});
}

TEST_CASE("blocklist merge is a commutative union") {
    Blocklist a = build_blocklist(std::vector<Trial>{diff_trial("d1", 0, {1}, {2})});
    Blocklist b = build_blocklist(std::vector<Trial>{diff_trial("d2", 0, {1}, {2, 3})});
    Blocklist ab = a, ba = b;
    ab.merge(b);
    ba.merge(a);
    REQUIRE(ab.blocked_ids == ba.blocked_ids);
    REQUIRE(ab.provenance == ba.provenance);
    REQUIRE(ab.provenance.at(2) == std::vector<std::string>{"d1#0", "d2#0"});
}

TEST_CASE("decode filter rejects sequences touching any blocked id") {
    Blocklist bl;
    bl.blocked_ids = {5};
    DecodeFilter f{bl};
    REQUIRE(f.allows_sequence({1, 2, 3}));
    REQUIRE_FALSE(f.allows_sequence({1, 5, 3}));
    REQUIRE(f.allows_sequence({}));
}

TEST_CASE("apply_filter removes blocked candidates and renormalizes") {
    Blocklist bl;
    bl.blocked_ids = {2};
    DecodeFilter f{bl};
    std::vector<WeightedCandidate> cands = {{1, 0.2}, {2, 0.5}, {3, 0.3}};
    auto kept = apply_filter(f, cands);
    REQUIRE(kept.size() == 2);
    REQUIRE(kept[0].id == 1);
    REQUIRE(kept[1].id == 3);
    REQUIRE(kept[0].weight == Catch::Approx(0.4));
    REQUIRE(kept[1].weight == Catch::Approx(0.6));
    // relative proportions preserved
    REQUIRE(kept[0].weight / kept[1].weight == Catch::Approx(0.2 / 0.3));
}

TEST_CASE("apply_filter error paths") {
    DecodeFilter f;
    REQUIRE_THROWS_AS(apply_filter(f, {{1, -0.5}, {2, 1.5}}), Error);
    REQUIRE_THROWS_AS(apply_filter(f, {{1, 0.0}}), Error);
    f.blocklist.blocked_ids = {1, 2};
    REQUIRE_THROWS_AS(apply_filter(f, {{1, 0.5}, {2, 0.5}}), Error);
}

TEST_CASE("logit bias export uses the forbid sentinel") {
    Blocklist bl;
    bl.blocked_ids = {7, 9};
    auto bias = export_logit_bias(bl);
    REQUIRE(bias.size() == 2);
    REQUIRE(bias.at(7) == -100.0);
    REQUIRE(bias.at(9) == -100.0);
}

TEST_CASE("blocklist built from analyzed fixture trials blocks phantom ids only") {
    const Vocabulary& v = toy_vocab();
    auto sfeb = *v.find(" February");
    auto space = *v.find(" ");
    auto feb = *v.find("February");
    std::vector<Trial> trials = {diff_trial("d", 0, {sfeb}, {space, feb})};
    Blocklist bl = build_blocklist(trials);
    REQUIRE(bl.blocks(space));
    REQUIRE(bl.blocks(feb));
    REQUIRE_FALSE(bl.blocks(sfeb));
}
