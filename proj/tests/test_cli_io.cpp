#include <atomic>
#include <filesystem>
#include <thread>

#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace phantom;

namespace {

std::string temp_file(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("jsonl files start with a schema header and round-trip") {
    std::vector<CorpusDoc> docs = {{"a", "one two"}, {"b", "three\nfour"}};
    std::string body = corpus_to_jsonl(docs);
    REQUIRE(body.rfind("{\"schema\":\"corpus\"", 0) == 0);

    std::string path = temp_file("pp_corpus.jsonl");
    atomic_write_file(path, body);
    auto back = read_corpus(path);
    REQUIRE(back.size() == 2);
    REQUIRE(back[0].doc_id == "a");
    REQUIRE(back[1].text == "three\nfour");
}

TEST_CASE("header validation: wrong schema and missing header fail loudly") {
    std::string path = temp_file("pp_bad.jsonl");
    atomic_write_file(path, JsonlWriter::header("trials") + "\n");
    REQUIRE_THROWS_WITH(read_jsonl(path, "corpus"),
                        Catch::Matchers::ContainsSubstring("schema"));
    atomic_write_file(path, "{\"doc_id\":\"x\"}\n");
    REQUIRE_THROWS_AS(read_jsonl(path, "corpus"), Error);
    atomic_write_file(path, JsonlWriter::header("corpus") + "\nnot json\n");
    REQUIRE_THROWS_WITH(read_jsonl(path, "corpus"),
                        Catch::Matchers::ContainsSubstring(":2"));
}

TEST_CASE("annotated docs round-trip with spans intact") {
    SelectorConfig cfg;
    cfg.fraction = 0.5;
    cfg.seed = 1;
    std::vector<AnnotatedDoc> docs = {
        annotate_document("d1", "the February plan for Saturday", cfg)};
    std::string path = temp_file("pp_annotated.jsonl");
    atomic_write_file(path, annotated_to_jsonl(docs));
    auto back = read_annotated(path);
    REQUIRE(back.size() == 1);
    REQUIRE(back[0].doc_id == docs[0].doc_id);
    REQUIRE(back[0].original_text == docs[0].original_text);
    REQUIRE(back[0].targets == docs[0].targets);
    REQUIRE(back[0].bracketed_text == docs[0].bracketed_text);
    REQUIRE(back[0].prompt == docs[0].prompt);
}

TEST_CASE("outputs round-trip, with and without token ids") {
    std::vector<OutputDoc> docs = {{"d1", "some text", std::vector<TokenId>{1, 2, 3}},
                                   {"d2", "other text", std::nullopt}};
    std::string path = temp_file("pp_outputs.jsonl");
    atomic_write_file(path, outputs_to_jsonl(docs));
    auto back = read_outputs(path);
    REQUIRE(back[0].output_ids.has_value());
    REQUIRE(*back[0].output_ids == std::vector<TokenId>{1, 2, 3});
    REQUIRE_FALSE(back[1].output_ids.has_value());
}

TEST_CASE("trials round-trip including taxonomy labels") {
    Trial t;
    t.doc_id = "d1";
    t.target_index = 4;
    t.input_word = "February";
    t.output_surface = "February";
    t.input_span_ids = {10};
    t.output_span_ids = {11, 12};
    t.outcome = Outcome::Different;
    t.error_type = "E1_whitespace_boundary_shift";
    t.fired_mask = 1;
    Trial plain;
    plain.doc_id = "d1";
    plain.outcome = Outcome::Replaced;

    std::string path = temp_file("pp_trials.jsonl");
    atomic_write_file(path, trials_to_jsonl({t, plain}));
    auto back = read_trials(path);
    REQUIRE(back.size() == 2);
    REQUIRE(back[0].outcome == Outcome::Different);
    REQUIRE(back[0].error_type == t.error_type);
    REQUIRE(back[0].fired_mask == 1);
    REQUIRE(back[0].output_span_ids == t.output_span_ids);
    REQUIRE(back[1].error_type.empty());
}

TEST_CASE("blocklist serialization keeps ids and provenance") {
    Blocklist bl;
    bl.blocked_ids = {3, 9};
    bl.provenance[3] = {"d1#0"};
    bl.provenance[9] = {"d1#0", "d2#1"};
    std::string path = temp_file("pp_blocklist.jsonl");
    atomic_write_file(path, blocklist_to_jsonl(bl));
    Blocklist back = read_blocklist(path);
    REQUIRE(back.blocked_ids == bl.blocked_ids);
    REQUIRE(back.provenance == bl.provenance);

    std::string bias = logit_bias_to_json(bl);
    auto j = nlohmann::json::parse(bias);
    REQUIRE(j["3"] == -100.0);
    REQUIRE(j["9"] == -100.0);
}

TEST_CASE("labels file round-trips planted ground truth") {
    LabeledOutput out;
    out.doc_id = "d1";
    PlantedLabel l;
    l.target_index = 2;
    l.outcome = Outcome::Different;
    l.error = ErrorType::E5_ProperNounSegmentation;
    l.transition = 1;
    l.span_ids = {5, 6};
    out.labels.push_back(l);
    std::string path = temp_file("pp_labels.jsonl");
    atomic_write_file(path, labels_to_jsonl({out}));
    auto back = read_labels(path);
    REQUIRE(back.size() == 1);
    REQUIRE(back[0].error == ErrorType::E5_ProperNounSegmentation);
    REQUIRE(back[0].transition == 1);
    REQUIRE(back[0].span_ids == std::vector<TokenId>{5, 6});
}

TEST_CASE("mixture presets load and validate") {
    BehaviorMixture m = load_mixture(data_path("presets/finding1_transitions.json"));
    REQUIRE(m.strategy == PhantomStrategy::ByTransition);
    REQUIRE(m.split_merge_profile[0] == Catch::Approx(0.78));
    REQUIRE(m.split_merge_profile[2] == Catch::Approx(0.023));

    BehaviorMixture e = load_mixture(data_path("presets/finding2_cell11.json"));
    REQUIRE(e.phantom_profile[0] == Catch::Approx(0.722));
    REQUIRE(e.phantom_profile[3] == Catch::Approx(0.278));

    nlohmann::json bad = {{"p_unchanged", 0.5}, {"p_replaced", 0.2}, {"p_phantom", 0.1}};
    REQUIRE_THROWS_AS(mixture_from_json(bad, "test"), Error);
}

TEST_CASE("sha-256 matches published test vectors") {
    REQUIRE(sha256_hex("") ==
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    REQUIRE(sha256_hex("abc") ==
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    REQUIRE(sha256_hex(std::string(1000000, 'a')) ==
            "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("run manifest pins the vocabulary by content hash") {
    RunManifest m = make_manifest("run-1", data_path("toyvoc.json"), 42,
                                  {{"fraction", 0.5}});
    REQUIRE(m.vocab_sha256.size() == 64);
    RunManifest again = make_manifest("run-1", data_path("toyvoc.json"), 42,
                                      {{"fraction", 0.5}});
    REQUIRE(m.vocab_sha256 == again.vocab_sha256);
    auto j = nlohmann::json::parse(manifest_to_json(m));
    REQUIRE(j["run_id"] == "run-1");
    REQUIRE(j["seed"] == 42);
    REQUIRE(j["vocab_sha256"] == m.vocab_sha256);
    REQUIRE(j["tool_version"] == kToolVersion);
}

// ---- endpoint client ---------------------------------------------------

namespace {

struct MockServer {
    httplib::Server svr;
    std::thread thread;
    int port = 0;

    explicit MockServer(std::function<void(const httplib::Request&, httplib::Response&)> h) {
        svr.Post("/v1/completions", std::move(h));
        port = svr.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { svr.listen_after_bind(); });
        svr.wait_until_ready();
    }

    ~MockServer() {
        svr.stop();
        thread.join();
    }

    EndpointConfig config() const {
        EndpointConfig cfg;
        cfg.port = port;
        cfg.initial_backoff = std::chrono::milliseconds(10);
        cfg.max_backoff = std::chrono::milliseconds(40);
        return cfg;
    }
};

} // namespace

TEST_CASE("client round-trips the wire protocol") {
    MockServer server([](const httplib::Request& req, httplib::Response& res) {
        auto j = nlohmann::json::parse(req.body);
        REQUIRE(j.contains("prompt"));
        REQUIRE(j.contains("max_tokens"));
        nlohmann::json out = {{"text", "echo: " + j["prompt"].get<std::string>()},
                              {"token_ids", {1, 2, 3}}};
        res.set_content(out.dump(), "application/json");
    });
    CompletionClient client(server.config());
    CompletionResult r = client.generate("hello");
    REQUIRE(r.text == "echo: hello");
    REQUIRE(r.token_ids.has_value());
    REQUIRE(*r.token_ids == std::vector<TokenId>{1, 2, 3});
}

TEST_CASE("client forwards the logit bias map") {
    MockServer server([](const httplib::Request& req, httplib::Response& res) {
        auto j = nlohmann::json::parse(req.body);
        REQUIRE(j.contains("logit_bias"));
        REQUIRE(j["logit_bias"]["17"] == -100.0);
        res.set_content(R"({"text":"ok"})", "application/json");
    });
    CompletionClient client(server.config());
    std::map<TokenId, double> bias = {{17, kLogitBiasForbid}};
    REQUIRE(client.generate("p", &bias).text == "ok");
}

TEST_CASE("client retries server errors with backoff, then succeeds") {
    std::atomic<int> calls{0};
    MockServer server([&](const httplib::Request&, httplib::Response& res) {
        if (++calls <= 2) {
            res.status = 500;
            return;
        }
        res.set_content(R"({"text":"recovered"})", "application/json");
    });
    CompletionClient client(server.config());
    REQUIRE(client.generate("p").text == "recovered");
    REQUIRE(calls == 3);
}

TEST_CASE("client gives up after max attempts and reports transport failure") {
    std::atomic<int> calls{0};
    MockServer server([&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 503;
    });
    CompletionClient client(server.config());
    try {
        client.generate("p");
        FAIL("expected a transport error");
    } catch (const Error& e) {
        REQUIRE(e.kind() == ErrorKind::Transport);
        REQUIRE(e.exit_code() == 4);
    }
    REQUIRE(calls == 3);
}

TEST_CASE("client errors on non-retryable statuses without retrying") {
    std::atomic<int> calls{0};
    MockServer server([&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 404;
    });
    CompletionClient client(server.config());
    REQUIRE_THROWS_AS(client.generate("p"), Error);
    REQUIRE(calls == 1);
}

TEST_CASE("client rejects malformed endpoint responses") {
    MockServer server([](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"no_text\":true}", "application/json");
    });
    CompletionClient client(server.config());
    REQUIRE_THROWS_WITH(client.generate("p"),
                        Catch::Matchers::ContainsSubstring("text"));
}

TEST_CASE("connection failure to a dead port is a transport error") {
    EndpointConfig cfg;
    cfg.port = 1; // nothing listens here
    cfg.max_attempts = 2;
    cfg.initial_backoff = std::chrono::milliseconds(5);
    cfg.timeout = std::chrono::seconds(2);
    CompletionClient client(cfg);
    try {
        client.generate("p");
        FAIL("expected a transport error");
    } catch (const Error& e) {
        REQUIRE(e.kind() == ErrorKind::Transport);
    }
}
