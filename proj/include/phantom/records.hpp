#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phantom/alignment.hpp"
#include "phantom/error.hpp"
#include "phantom/masking.hpp"
#include "phantom/probe.hpp"
#include "phantom/sha256.hpp"
#include "phantom/simulator.hpp"
#include "phantom/taxonomy.hpp"

namespace phantom {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// ---- line-delimited files with a one-line header record ----------------

class JsonlWriter {
public:
    explicit JsonlWriter(const std::string& schema) { lines_ << header(schema) << '\n'; }

    static std::string header(const std::string& schema) {
        json h = {{"schema", schema}, {"version", kSchemaVersion}};
        return h.dump();
    }

    void write(const json& record) { lines_ << record.dump() << '\n'; }

    std::string str() const { return lines_.str(); }

private:
    std::ostringstream lines_;
};

// write-temp-then-rename
inline void atomic_write_file(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw data_error("cannot write file: " + tmp);
        out << content;
        if (!out) throw data_error("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw data_error("cannot rename " + tmp + " -> " + path + ": " + ec.message());
}

inline std::vector<json> read_jsonl(const std::string& path, const std::string& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open file: " + path);
    std::vector<json> records;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": malformed record: " + e.what());
        }
        if (!header_seen) {
            if (!j.contains("schema") || j["schema"] != schema)
                throw data_error(path + ":1: expected header with schema \"" + schema +
                                 "\"");
            header_seen = true;
            continue;
        }
        records.push_back(std::move(j));
    }
    if (!header_seen)
        throw data_error(path + ": missing header record (schema \"" + schema + "\")");
    return records;
}

namespace detail {

template <typename T>
T require_field(const json& j, const char* field, const std::string& ctx) {
    if (!j.contains(field))
        throw data_error(ctx + ": missing field \"" + field + "\"");
    try {
        return j.at(field).get<T>();
    } catch (const json::exception& e) {
        throw data_error(ctx + ": bad field \"" + field + "\": " + e.what());
    }
}

} // namespace detail

// ---- corpus: {doc_id, text} -------------------------------------------

struct CorpusDoc {
    std::string doc_id;
    std::string text;
};

inline std::vector<CorpusDoc> read_corpus(const std::string& path) {
    std::vector<CorpusDoc> docs;
    std::size_t n = 0;
    for (const json& j : read_jsonl(path, "corpus")) {
        ++n;
        std::string ctx = path + " corpus record " + std::to_string(n);
        docs.push_back({detail::require_field<std::string>(j, "doc_id", ctx),
                        detail::require_field<std::string>(j, "text", ctx)});
    }
    return docs;
}

inline std::string corpus_to_jsonl(const std::vector<CorpusDoc>& docs) {
    JsonlWriter w("corpus");
    for (const auto& d : docs) w.write({{"doc_id", d.doc_id}, {"text", d.text}});
    return w.str();
}

// ---- annotated docs ----------------------------------------------------

inline json annotated_to_json(const AnnotatedDoc& d) {
    json targets = json::array();
    for (const auto& t : d.targets)
        targets.push_back({{"begin", t.begin}, {"end", t.end}, {"word", t.word}});
    return {{"doc_id", d.doc_id},
            {"original_text", d.original_text},
            {"targets", targets},
            {"bracketed_text", d.bracketed_text},
            {"prompt", d.prompt}};
}

inline AnnotatedDoc annotated_from_json(const json& j, const std::string& ctx) {
    AnnotatedDoc d;
    d.doc_id = detail::require_field<std::string>(j, "doc_id", ctx);
    d.original_text = detail::require_field<std::string>(j, "original_text", ctx);
    d.bracketed_text = detail::require_field<std::string>(j, "bracketed_text", ctx);
    d.prompt = detail::require_field<std::string>(j, "prompt", ctx);
    if (!j.contains("targets") || !j["targets"].is_array())
        throw data_error(ctx + ": missing targets array");
    for (const json& t : j["targets"]) {
        TargetSpan span;
        span.begin = detail::require_field<std::uint32_t>(t, "begin", ctx);
        span.end = detail::require_field<std::uint32_t>(t, "end", ctx);
        span.word = detail::require_field<std::string>(t, "word", ctx);
        d.targets.push_back(std::move(span));
    }
    return d;
}

inline std::string annotated_to_jsonl(const std::vector<AnnotatedDoc>& docs) {
    JsonlWriter w("annotated");
    for (const auto& d : docs) w.write(annotated_to_json(d));
    return w.str();
}

inline std::vector<AnnotatedDoc> read_annotated(const std::string& path) {
    std::vector<AnnotatedDoc> docs;
    std::size_t n = 0;
    for (const json& j : read_jsonl(path, "annotated")) {
        ++n;
        docs.push_back(annotated_from_json(j, path + " annotated record " +
                                                  std::to_string(n)));
    }
    return docs;
}

// ---- model outputs: {doc_id, output_text, output_ids?} -----------------

struct OutputDoc {
    std::string doc_id;
    std::string output_text;
    std::optional<std::vector<TokenId>> output_ids;
};

inline std::string outputs_to_jsonl(const std::vector<OutputDoc>& docs) {
    JsonlWriter w("outputs");
    for (const auto& d : docs) {
        json j = {{"doc_id", d.doc_id}, {"output_text", d.output_text}};
        if (d.output_ids) j["output_ids"] = *d.output_ids;
        w.write(j);
    }
    return w.str();
}

inline std::vector<OutputDoc> read_outputs(const std::string& path) {
    std::vector<OutputDoc> docs;
    std::size_t n = 0;
    for (const json& j : read_jsonl(path, "outputs")) {
        ++n;
        std::string ctx = path + " outputs record " + std::to_string(n);
        OutputDoc d;
        d.doc_id = detail::require_field<std::string>(j, "doc_id", ctx);
        d.output_text = detail::require_field<std::string>(j, "output_text", ctx);
        if (j.contains("output_ids"))
            d.output_ids = detail::require_field<std::vector<TokenId>>(j, "output_ids", ctx);
        docs.push_back(std::move(d));
    }
    return docs;
}

// ---- trials ------------------------------------------------------------

inline json trial_to_json(const Trial& t) {
    json j = {{"doc_id", t.doc_id},
              {"target_index", t.target_index},
              {"input_word", t.input_word},
              {"output_surface", t.output_surface},
              {"input_ids", t.input_span_ids},
              {"output_ids", t.output_span_ids},
              {"outcome", outcome_name(t.outcome)}};
    if (!t.error_type.empty()) {
        j["error_type"] = t.error_type;
        j["fired_predicates"] = t.fired_mask;
    }
    return j;
}

inline Trial trial_from_json(const json& j, const std::string& ctx) {
    Trial t;
    t.doc_id = detail::require_field<std::string>(j, "doc_id", ctx);
    t.target_index = detail::require_field<std::uint32_t>(j, "target_index", ctx);
    t.input_word = detail::require_field<std::string>(j, "input_word", ctx);
    t.output_surface = detail::require_field<std::string>(j, "output_surface", ctx);
    t.input_span_ids = detail::require_field<std::vector<TokenId>>(j, "input_ids", ctx);
    t.output_span_ids = detail::require_field<std::vector<TokenId>>(j, "output_ids", ctx);
    t.outcome = parse_outcome(detail::require_field<std::string>(j, "outcome", ctx));
    if (j.contains("error_type")) {
        t.error_type = j["error_type"].get<std::string>();
        t.fired_mask = j.value("fired_predicates", 0u);
    }
    return t;
}

inline std::string trials_to_jsonl(const std::vector<Trial>& trials) {
    JsonlWriter w("trials");
    for (const auto& t : trials) w.write(trial_to_json(t));
    return w.str();
}

inline std::vector<Trial> read_trials(const std::string& path) {
    std::vector<Trial> trials;
    std::size_t n = 0;
    for (const json& j : read_jsonl(path, "trials")) {
        ++n;
        trials.push_back(trial_from_json(j, path + " trials record " + std::to_string(n)));
    }
    return trials;
}

// ---- planted labels ----------------------------------------------------

inline std::string labels_to_jsonl(const std::vector<LabeledOutput>& outputs) {
    JsonlWriter w("labels");
    for (const auto& o : outputs) {
        for (const auto& l : o.labels) {
            json j = {{"doc_id", o.doc_id},
                      {"target_index", l.target_index},
                      {"outcome", outcome_name(l.outcome)},
                      {"transition", l.transition},
                      {"span_ids", l.span_ids}};
            if (l.error) j["error_type"] = error_type_name(*l.error);
            if (l.outcome == Outcome::Replaced) {
                j["replacement"] = l.replacement;
                j["synonym_missing"] = l.synonym_missing;
            }
            w.write(j);
        }
    }
    return w.str();
}

struct PlantedRecord {
    std::string doc_id;
    std::uint32_t target_index = 0;
    Outcome outcome = Outcome::Unchanged;
    std::optional<ErrorType> error;
    int transition = 0;
    std::vector<TokenId> span_ids;
};

inline std::vector<PlantedRecord> read_labels(const std::string& path) {
    std::vector<PlantedRecord> out;
    std::size_t n = 0;
    for (const json& j : read_jsonl(path, "labels")) {
        ++n;
        std::string ctx = path + " labels record " + std::to_string(n);
        PlantedRecord r;
        r.doc_id = detail::require_field<std::string>(j, "doc_id", ctx);
        r.target_index = detail::require_field<std::uint32_t>(j, "target_index", ctx);
        r.outcome = parse_outcome(detail::require_field<std::string>(j, "outcome", ctx));
        if (j.contains("error_type"))
            r.error = parse_error_type(j["error_type"].get<std::string>());
        r.transition = j.value("transition", 0);
        if (j.contains("span_ids"))
            r.span_ids = j["span_ids"].get<std::vector<TokenId>>();
        out.push_back(std::move(r));
    }
    return out;
}

// ---- blocklist ---------------------------------------------------------

inline std::string blocklist_to_jsonl(const Blocklist& bl) {
    JsonlWriter w("blocklist");
    json prov = json::object();
    for (const auto& [id, keys] : bl.provenance) prov[std::to_string(id)] = keys;
    w.write({{"ids", std::vector<TokenId>(bl.blocked_ids.begin(), bl.blocked_ids.end())},
             {"provenance", prov}});
    return w.str();
}

inline Blocklist read_blocklist(const std::string& path) {
    auto records = read_jsonl(path, "blocklist");
    if (records.size() != 1)
        throw data_error(path + ": blocklist file must hold exactly one record");
    const json& j = records[0];
    Blocklist bl;
    for (TokenId id : detail::require_field<std::vector<TokenId>>(j, "ids", path))
        bl.blocked_ids.insert(id);
    if (j.contains("provenance"))
        for (auto it = j["provenance"].begin(); it != j["provenance"].end(); ++it)
            bl.provenance[static_cast<TokenId>(std::stoul(it.key()))] =
                it.value().get<std::vector<std::string>>();
    return bl;
}

inline std::string logit_bias_to_json(const Blocklist& bl) {
    json j = json::object();
    for (const auto& [id, v] : export_logit_bias(bl)) j[std::to_string(id)] = v;
    return j.dump(2) + "\n";
}

// ---- mixtures / synonyms ----------------------------------------------

inline BehaviorMixture mixture_from_json(const json& j, const std::string& ctx) {
    BehaviorMixture m;
    m.p_unchanged = detail::require_field<double>(j, "p_unchanged", ctx);
    m.p_replaced = detail::require_field<double>(j, "p_replaced", ctx);
    m.p_phantom = detail::require_field<double>(j, "p_phantom", ctx);
    if (j.contains("phantom_profile")) {
        const json& p = j["phantom_profile"];
        const char* keys[8] = {"E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8"};
        for (int i = 0; i < 8; ++i)
            m.phantom_profile[i] = p.value(keys[i], 0.0);
    }
    if (j.contains("split_merge_profile")) {
        const json& p = j["split_merge_profile"];
        m.split_merge_profile[0] = p.value("same", 0.0);
        m.split_merge_profile[1] = p.value("split", 0.0);
        m.split_merge_profile[2] = p.value("merge", 0.0);
    }
    std::string strategy = j.value("strategy", std::string("by_error_type"));
    if (strategy == "by_error_type") m.strategy = PhantomStrategy::ByErrorType;
    else if (strategy == "by_transition") m.strategy = PhantomStrategy::ByTransition;
    else throw data_error(ctx + ": unknown strategy '" + strategy + "'");
    m.validate();
    return m;
}

inline BehaviorMixture load_mixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open mixture preset: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw data_error(path + ": " + e.what());
    }
    return mixture_from_json(j, path);
}

inline SynonymMap load_synonyms(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open synonym map: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw data_error(path + ": " + e.what());
    }
    SynonymMap map;
    for (auto it = j.begin(); it != j.end(); ++it)
        map[it.key()] = it.value().get<std::vector<std::string>>();
    return map;
}

// ---- run manifest ------------------------------------------------------

struct RunManifest {
    std::string run_id;
    std::string vocab_path;
    std::string vocab_sha256;
    std::uint64_t seed = 0;
    json config = json::object();
    std::string tool_version = kToolVersion;
};

inline std::string manifest_to_json(const RunManifest& m) {
    json j = {{"run_id", m.run_id},
              {"vocab_path", m.vocab_path},
              {"vocab_sha256", m.vocab_sha256},
              {"seed", m.seed},
              {"config", m.config},
              {"tool_version", m.tool_version}};
    return j.dump(2) + "\n";
}

inline RunManifest make_manifest(const std::string& run_id, const std::string& vocab_path,
                                 std::uint64_t seed, json config) {
    RunManifest m;
    m.run_id = run_id;
    m.vocab_path = vocab_path;
    m.vocab_sha256 = sha256_file_hex(vocab_path);
    m.seed = seed;
    m.config = std::move(config);
    return m;
}

} // namespace phantom
