#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "phantom/error.hpp"
#include "phantom/vocab.hpp"

namespace phantom {

struct EndpointConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string path = "/v1/completions";
    std::string api_key;                 // optional bearer token
    int max_tokens = 1024;
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{200};
    std::chrono::milliseconds max_backoff{5000};
    std::chrono::seconds timeout{30};
};

struct CompletionResult {
    std::string text;
    std::optional<std::vector<TokenId>> token_ids;
};

// OpenAI-compatible completion client with bounded exponential backoff.
// Wire protocol: POST {prompt, max_tokens, logit_bias?} ->
// {text, token_ids?}.
class CompletionClient {
public:
    explicit CompletionClient(EndpointConfig cfg) : cfg_(std::move(cfg)) {}

    CompletionResult
    generate(const std::string& prompt,
             const std::map<TokenId, double>* logit_bias = nullptr) const {
        nlohmann::json body = {{"prompt", prompt}, {"max_tokens", cfg_.max_tokens}};
        if (logit_bias) {
            nlohmann::json lb = nlohmann::json::object();
            for (const auto& [id, v] : *logit_bias) lb[std::to_string(id)] = v;
            body["logit_bias"] = lb;
        }
        std::string payload = body.dump();

        std::chrono::milliseconds backoff = cfg_.initial_backoff;
        std::string last_failure;
        for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
            if (attempt > 1) {
                std::this_thread::sleep_for(backoff);
                backoff = std::min(backoff * 2, cfg_.max_backoff);
            }
            httplib::Client cli(cfg_.host, cfg_.port);
            cli.set_connection_timeout(cfg_.timeout);
            cli.set_read_timeout(cfg_.timeout);
            httplib::Headers headers;
            if (!cfg_.api_key.empty())
                headers.emplace("Authorization", "Bearer " + cfg_.api_key);
            auto res = cli.Post(cfg_.path, headers, payload, "application/json");
            if (!res) {
                last_failure = "transport failure: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) {
                last_failure = "server error: HTTP " + std::to_string(res->status);
                continue; // retryable
            }
            if (res->status != 200)
                throw transport_error("endpoint returned HTTP " +
                                      std::to_string(res->status) + ": " + res->body);
            return parse_response(res->body);
        }
        throw transport_error(last_failure + " (after " +
                              std::to_string(cfg_.max_attempts) + " attempts)");
    }

private:
    static CompletionResult parse_response(const std::string& body) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw transport_error(std::string("malformed endpoint response: ") + e.what());
        }
        if (!j.contains("text") || !j["text"].is_string())
            throw transport_error("endpoint response missing \"text\" field");
        CompletionResult r;
        r.text = j["text"].get<std::string>();
        if (j.contains("token_ids"))
            r.token_ids = j["token_ids"].get<std::vector<TokenId>>();
        return r;
    }

    EndpointConfig cfg_;
};

} // namespace phantom
