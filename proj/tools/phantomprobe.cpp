// phantomprobe: tokenization-consistency probe toolkit.
//
// Subcommands cover the full pipeline: prepare a probed corpus, collect
// outputs from an endpoint (or the built-in simulator), analyze outputs into
// trial records, derive decode-time blocklists, and enumerate segmentation
// equivalence classes.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phantom/phantom.hpp"

using namespace phantom;

namespace {

struct VocabArgs {
    std::string path;
    std::string merges;
    std::string mode;
    int normalize = -1; // -1 unset, 0 off, 1 on

    void attach(CLI::App* cmd) {
        cmd->add_option("--vocab", path, "vocabulary JSON file")->required();
        cmd->add_option("--merges", merges,
                        "merges.txt for the two-file vocab.json layout");
        cmd->add_option("--mode", mode, "tokenizer mode: byte_level or metaspace")
            ->check(CLI::IsMember({"byte_level", "metaspace"}));
        cmd->add_flag(
            "--normalize-whitespace,!--no-normalize-whitespace",
            [this](std::int64_t count) { normalize = count > 0 ? 1 : 0; },
            "override the vocabulary's whitespace normalization setting");
    }

    Vocabulary load() const {
        std::optional<bool> norm;
        if (normalize >= 0) norm = normalize == 1;
        if (!merges.empty()) {
            if (!mode.empty() && mode != "byte_level")
                throw usage_error("--merges implies byte_level mode");
            return load_vocab_merges(path, merges, norm);
        }
        std::optional<VocabMode> m;
        if (!mode.empty()) m = parse_mode(mode);
        return load_vocabulary(path, m, norm);
    }
};

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void maybe_write_manifest(const std::string& manifest_path, const std::string& run_id,
                          const std::string& vocab_path, std::uint64_t seed,
                          json config) {
    if (manifest_path.empty()) return;
    RunManifest m = make_manifest(run_id, vocab_path, seed, std::move(config));
    atomic_write_file(manifest_path, manifest_to_json(m));
}

// ---- prepare -----------------------------------------------------------

int cmd_prepare(const VocabArgs& vocab_args, const std::string& corpus_path,
                const std::string& out_path, double fraction, std::uint64_t seed,
                std::uint32_t min_chars, std::uint32_t max_chars,
                const std::string& stopword_path, const std::string& template_path,
                bool keep_all, const std::string& manifest_path) {
    Vocabulary vocab = vocab_args.load(); // fail early on a bad vocabulary
    (void)vocab;
    auto stopwords =
        stopword_path.empty() ? default_stopwords() : load_stopwords(stopword_path);
    std::string tmpl = template_path.empty() ? std::string(kDefaultPromptTemplate)
                                             : read_text_file(template_path);

    SelectorConfig cfg;
    cfg.fraction = fraction;
    cfg.min_word_chars = min_chars;
    cfg.max_word_chars = max_chars;

    std::vector<AnnotatedDoc> docs;
    std::size_t skipped = 0;
    for (const CorpusDoc& d : read_corpus(corpus_path)) {
        if (!keep_all && !passes_corpus_filter(d.text)) {
            ++skipped;
            continue;
        }
        cfg.seed = DetRng(seed).derive(std::hash<std::string>{}(d.doc_id)).next();
        docs.push_back(annotate_document(d.doc_id, d.text, cfg, stopwords, tmpl));
    }
    if (docs.empty()) throw data_error("no documents passed the corpus filter");
    atomic_write_file(out_path, annotated_to_jsonl(docs));
    maybe_write_manifest(manifest_path, "prepare", vocab_args.path, seed,
                         {{"corpus", corpus_path},
                          {"fraction", fraction},
                          {"documents", docs.size()},
                          {"skipped", skipped}});
    std::size_t targets = 0;
    for (const auto& d : docs) targets += d.targets.size();
    std::cerr << "prepared " << docs.size() << " documents (" << targets
              << " targets, " << skipped << " skipped by length filter)\n";
    return 0;
}

// ---- analyze -----------------------------------------------------------

int cmd_analyze(const VocabArgs& vocab_args, const std::string& annotated_path,
                const std::string& outputs_path, const std::string& out_path,
                const std::string& matrix_csv, const std::string& mean_csv,
                bool count_gap_tokens, const std::string& affix_path) {
    Vocabulary vocab = vocab_args.load();
    auto affixes = affix_path.empty() ? default_affixes() : load_stopwords(affix_path);
    AnalysisResult res =
        analyze_corpus(vocab, read_annotated(annotated_path),
                       read_outputs(outputs_path), count_gap_tokens, affixes);
    atomic_write_file(out_path, trials_to_jsonl(res.trials));
    if (!matrix_csv.empty()) atomic_write_file(matrix_csv, res.matrix.counts_csv());
    if (!mean_csv.empty()) atomic_write_file(mean_csv, res.matrix.mean_chars_csv());

    json summary = {{"trials", res.trials.size()},
                    {"unchanged", res.distribution.unchanged},
                    {"replaced", res.distribution.replaced},
                    {"different", res.distribution.different},
                    {"discarded", res.distribution.discarded}};
    if (res.distribution.classified_total() > 0) {
        summary["fractions"] = {
            {"unchanged", *res.distribution.fraction(Outcome::Unchanged)},
            {"replaced", *res.distribution.fraction(Outcome::Replaced)},
            {"different", *res.distribution.fraction(Outcome::Different)}};
    }
    if (res.matrix.total() > 0) {
        SplitMergeSummary s = split_merge_summary(res.matrix);
        summary["split_merge"] = {{"same", s.same_fraction},
                                  {"split", s.split_fraction},
                                  {"merge", s.merge_fraction}};
    }
    json hist = json::object();
    for (const auto& [name, count] : res.error_histogram) hist[name] = count;
    summary["error_types"] = hist;
    std::cout << summary.dump(2) << "\n";
    return 0;
}

// ---- mask --------------------------------------------------------------

int cmd_mask(const std::string& trials_path, const std::string& out_path,
             const std::string& bias_path, const std::vector<std::string>& merge_paths) {
    Blocklist bl = build_blocklist(read_trials(trials_path));
    for (const std::string& p : merge_paths) bl.merge(read_blocklist(p));
    atomic_write_file(out_path, blocklist_to_jsonl(bl));
    if (!bias_path.empty()) atomic_write_file(bias_path, logit_bias_to_json(bl));
    std::cerr << "blocked " << bl.blocked_ids.size() << " token ids\n";
    return 0;
}

// ---- simulate ----------------------------------------------------------

int cmd_simulate(const VocabArgs& vocab_args, const std::string& annotated_path,
                 const std::string& preset_path, std::uint64_t seed,
                 std::size_t n_trials, const std::string& out_path,
                 const std::string& labels_path, const std::string& synonyms_path,
                 const std::string& blocklist_path, const std::string& used_path,
                 const std::string& manifest_path) {
    Vocabulary vocab = vocab_args.load();
    BehaviorMixture mixture = load_mixture(preset_path);
    SynonymMap synonyms =
        synonyms_path.empty() ? SynonymMap{} : load_synonyms(synonyms_path);
    DecodeFilter filter;
    bool filtered = !blocklist_path.empty();
    if (filtered) filter.blocklist = read_blocklist(blocklist_path);

    Simulator sim(vocab, mixture, synonyms, default_affixes(),
                  filtered ? &filter : nullptr);
    std::vector<AnnotatedDoc> docs = read_annotated(annotated_path);
    if (n_trials == 0)
        for (const auto& d : docs) n_trials += d.targets.size();
    auto run = sim.generate_corpus(docs, seed, n_trials);

    std::vector<OutputDoc> outputs;
    for (const LabeledOutput& o : run.outputs)
        outputs.push_back({o.doc_id, o.output_text, o.output_ids});
    atomic_write_file(out_path, outputs_to_jsonl(outputs));
    if (!labels_path.empty())
        atomic_write_file(labels_path, labels_to_jsonl(run.outputs));
    if (!used_path.empty())
        atomic_write_file(used_path, annotated_to_jsonl(run.used_docs));
    maybe_write_manifest(manifest_path, "simulate", vocab_args.path, seed,
                         {{"preset", preset_path},
                          {"trials", n_trials},
                          {"masked", filtered},
                          {"documents", run.used_docs.size()}});
    std::cerr << "simulated " << n_trials << " trials over " << run.used_docs.size()
              << " documents\n";
    return 0;
}

// ---- enumerate ---------------------------------------------------------

int cmd_enumerate(const VocabArgs& vocab_args, const std::string& surface,
                  bool plausible_only, std::size_t limit, bool count_only) {
    Vocabulary vocab = vocab_args.load();
    if (count_only) {
        json j = {{"surface", surface},
                  {"count", count_segmentations(vocab, surface, plausible_only)}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    EnumerateOptions opts;
    opts.limit = limit;
    opts.plausible_only = plausible_only;
    EquivalenceClass cls = enumerate_segmentations(vocab, surface, opts);
    json members = json::array();
    for (const auto& ids : cls.members) {
        json tokens = json::array();
        for (TokenId id : ids) tokens.push_back(bytes_to_printable(vocab.token(id)));
        members.push_back({{"ids", ids}, {"tokens", tokens}});
    }
    json canonical_tokens = json::array();
    for (TokenId id : cls.canonical)
        canonical_tokens.push_back(bytes_to_printable(vocab.token(id)));
    json j = {{"surface", surface},
              {"count", cls.members.size()},
              {"canonical", {{"ids", cls.canonical}, {"tokens", canonical_tokens}}},
              {"members", members}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---- remote-generate ---------------------------------------------------

int cmd_remote(const std::string& annotated_path, const std::string& out_path,
               const EndpointConfig& cfg, const std::string& blocklist_path) {
    std::optional<std::map<TokenId, double>> bias;
    if (!blocklist_path.empty())
        bias = export_logit_bias(read_blocklist(blocklist_path));
    CompletionClient client(cfg);
    std::vector<OutputDoc> outputs;
    std::vector<AnnotatedDoc> docs = read_annotated(annotated_path);
    for (const AnnotatedDoc& d : docs) {
        CompletionResult r = client.generate(d.prompt, bias ? &*bias : nullptr);
        outputs.push_back({d.doc_id, r.text, r.token_ids});
    }
    atomic_write_file(out_path, outputs_to_jsonl(outputs));
    std::cerr << "collected " << outputs.size() << " outputs\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tokenization-consistency probe toolkit"};
    app.require_subcommand(1);

    VocabArgs vocab_args;

    // prepare
    auto* prepare = app.add_subcommand("prepare", "select targets and build prompts");
    std::string corpus_path, out_path, stopword_path, template_path, manifest_path;
    double fraction = 0.05;
    std::uint64_t seed = 0;
    std::uint32_t min_chars = 0, max_chars = 0;
    bool keep_all = false;
    vocab_args.attach(prepare);
    prepare->add_option("--corpus", corpus_path, "corpus JSONL")->required();
    prepare->add_option("--out", out_path, "annotated JSONL output")->required();
    prepare->add_option("--fraction", fraction, "fraction of eligible words to probe");
    prepare->add_option("--seed", seed, "selection seed");
    prepare->add_option("--min-word-chars", min_chars, "minimum target length");
    prepare->add_option("--max-word-chars", max_chars, "maximum target length");
    prepare->add_option("--stopwords", stopword_path, "stopword list override");
    prepare->add_option("--template", template_path, "prompt template with {doc}");
    prepare->add_flag("--keep-all", keep_all, "skip the document length filter");
    prepare->add_option("--manifest", manifest_path, "write a run manifest here");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "classify outputs into trials");
    std::string annotated_path, outputs_path, trials_path, matrix_csv, mean_csv,
        affix_path;
    bool count_gap_tokens = false;
    VocabArgs analyze_vocab;
    analyze_vocab.attach(analyze);
    analyze->add_option("--annotated", annotated_path, "annotated JSONL")->required();
    analyze->add_option("--outputs", outputs_path, "model outputs JSONL")->required();
    analyze->add_option("--out", trials_path, "trials JSONL output")->required();
    analyze->add_option("--matrix-csv", matrix_csv, "transition count grid CSV");
    analyze->add_option("--mean-chars-csv", mean_csv, "mean word length grid CSV");
    analyze->add_flag("--count-gap-tokens", count_gap_tokens,
                      "include whitespace tokens in fragment counts");
    analyze->add_option("--affixes", affix_path, "affix list override");

    // mask
    auto* mask = app.add_subcommand("mask", "derive a blocklist from trials");
    std::string mask_trials, mask_out, bias_path;
    std::vector<std::string> merge_paths;
    mask->add_option("--trials", mask_trials, "trials JSONL")->required();
    mask->add_option("--out", mask_out, "blocklist JSONL output")->required();
    mask->add_option("--logit-bias", bias_path, "also export a logit_bias JSON map");
    mask->add_option("--merge", merge_paths, "existing blocklists to union in");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "synthetic model with labels");
    std::string sim_annotated, preset_path, sim_out, labels_path, synonyms_path,
        sim_blocklist, used_path, sim_manifest;
    std::uint64_t sim_seed = 0;
    std::size_t n_trials = 0;
    VocabArgs sim_vocab;
    sim_vocab.attach(simulate);
    simulate->add_option("--annotated", sim_annotated, "annotated JSONL")->required();
    simulate->add_option("--preset", preset_path, "behavior mixture preset")->required();
    simulate->add_option("--out", sim_out, "outputs JSONL")->required();
    simulate->add_option("--labels", labels_path, "planted ground-truth JSONL");
    simulate->add_option("--seed", sim_seed, "generation seed");
    simulate->add_option("--trials", n_trials, "trial quota (0 = all targets)");
    simulate->add_option("--synonyms", synonyms_path, "synonym map JSON");
    simulate->add_option("--blocklist", sim_blocklist, "decode-time filter blocklist");
    simulate->add_option("--used-annotated", used_path,
                         "write the (possibly trimmed) annotated docs used");
    simulate->add_option("--manifest", sim_manifest, "write a run manifest here");

    // enumerate
    auto* enumerate = app.add_subcommand("enumerate", "segmentation equivalence class");
    std::string surface;
    bool plausible_only = false, count_only = false;
    std::size_t limit = 10000;
    VocabArgs enum_vocab;
    enum_vocab.attach(enumerate);
    enumerate->add_option("--surface", surface, "surface string to enumerate")
        ->required();
    enumerate->add_flag("--plausible-only", plausible_only,
                        "exclude single-byte tokens");
    enumerate->add_option("--limit", limit, "enumeration cap");
    enumerate->add_flag("--count-only", count_only, "print the count, skip members");

    // remote-generate
    auto* remote = app.add_subcommand("remote-generate",
                                      "collect outputs from a completion endpoint");
    std::string remote_annotated, remote_out, remote_blocklist;
    EndpointConfig endpoint;
    remote->add_option("--annotated", remote_annotated, "annotated JSONL")->required();
    remote->add_option("--out", remote_out, "outputs JSONL")->required();
    remote->add_option("--host", endpoint.host, "endpoint host");
    remote->add_option("--port", endpoint.port, "endpoint port");
    remote->add_option("--path", endpoint.path, "endpoint request path");
    remote->add_option("--api-key", endpoint.api_key, "bearer token");
    remote->add_option("--max-tokens", endpoint.max_tokens, "completion budget");
    remote->add_option("--max-attempts", endpoint.max_attempts, "retry budget");
    remote->add_option("--blocklist", remote_blocklist,
                       "blocklist to send as logit_bias");

    CLI11_PARSE(app, argc, argv);

    try {
        if (prepare->parsed())
            return cmd_prepare(vocab_args, corpus_path, out_path, fraction, seed,
                               min_chars, max_chars, stopword_path, template_path,
                               keep_all, manifest_path);
        if (analyze->parsed())
            return cmd_analyze(analyze_vocab, annotated_path, outputs_path, trials_path,
                               matrix_csv, mean_csv, count_gap_tokens, affix_path);
        if (mask->parsed()) return cmd_mask(mask_trials, mask_out, bias_path, merge_paths);
        if (simulate->parsed())
            return cmd_simulate(sim_vocab, sim_annotated, preset_path, sim_seed,
                                n_trials, sim_out, labels_path, synonyms_path,
                                sim_blocklist, used_path, sim_manifest);
        if (enumerate->parsed())
            return cmd_enumerate(enum_vocab, surface, plausible_only, limit, count_only);
        if (remote->parsed())
            return cmd_remote(remote_annotated, remote_out, endpoint, remote_blocklist);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
