#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "phantom/alignment.hpp"
#include "phantom/analytics.hpp"
#include "phantom/error.hpp"
#include "phantom/probe.hpp"
#include "phantom/records.hpp"
#include "phantom/taxonomy.hpp"
#include "phantom/vocab.hpp"

namespace phantom {

struct AnalysisResult {
    std::vector<Trial> trials; // ordered by (doc order, target_index)
    OutcomeDistribution distribution;
    TransitionMatrix matrix{8};
    std::map<std::string, std::uint64_t> error_histogram;
};

// Classify one document's output against its annotation, then label each
// Different trial with its taxonomy type.
inline std::vector<Trial>
analyze_document(const Vocabulary& vocab, const AnnotatedDoc& doc,
                 const OutputDoc& output,
                 const std::unordered_set<std::string>& affixes = default_affixes()) {
    bool had_brackets = false;
    std::string text = strip_brackets(output.output_text, &had_brackets);
    Encoding input_enc = vocab.encode(doc.original_text);
    Encoding output_enc = output.output_ids
                              ? assign_offsets(vocab, *output.output_ids, text)
                              : vocab.encode(text);
    std::vector<Trial> trials =
        classify_document(vocab, doc, text, input_enc, output_enc);
    for (Trial& t : trials) {
        if (t.outcome != Outcome::Different) continue;
        TaxonomyResult tr =
            classify_error(vocab, t.input_span_ids, t.output_span_ids, t.input_word,
                           affixes);
        t.error_type = error_type_name(tr.type);
        t.fired_mask = tr.fired_mask;
    }
    return trials;
}

inline AnalysisResult
analyze_corpus(const Vocabulary& vocab, const std::vector<AnnotatedDoc>& annotated,
               const std::vector<OutputDoc>& outputs, bool count_gap_tokens = false,
               const std::unordered_set<std::string>& affixes = default_affixes()) {
    std::unordered_map<std::string, const OutputDoc*> by_id;
    for (const auto& o : outputs) {
        if (!by_id.emplace(o.doc_id, &o).second)
            throw data_error("duplicate output doc_id: " + o.doc_id);
    }
    AnalysisResult res;
    for (const AnnotatedDoc& doc : annotated) {
        auto it = by_id.find(doc.doc_id);
        if (it == by_id.end())
            throw data_error("no output for doc_id: " + doc.doc_id);
        std::vector<Trial> trials = analyze_document(vocab, doc, *it->second, affixes);
        for (Trial& t : trials) {
            res.distribution.add(t.outcome);
            if (t.outcome == Outcome::Different) {
                res.matrix.record(
                    fragment_count(vocab, t.input_span_ids, count_gap_tokens),
                    fragment_count(vocab, t.output_span_ids, count_gap_tokens),
                    static_cast<std::uint32_t>(t.input_word.size()));
                ++res.error_histogram[t.error_type];
            }
            res.trials.push_back(std::move(t));
        }
    }
    return res;
}

} // namespace phantom
