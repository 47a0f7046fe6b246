#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "phantom/alignment.hpp"
#include "phantom/analytics.hpp"
#include "phantom/error.hpp"
#include "phantom/masking.hpp"
#include "phantom/probe.hpp"
#include "phantom/rng.hpp"
#include "phantom/segmentation.hpp"
#include "phantom/taxonomy.hpp"
#include "phantom/vocab.hpp"

namespace phantom {

enum class PhantomStrategy { ByErrorType, ByTransition };

struct BehaviorMixture {
    double p_unchanged = 1.0;
    double p_replaced = 0.0;
    double p_phantom = 0.0;
    // weights over E1..E8, used by the ByErrorType strategy
    std::array<double, 8> phantom_profile{};
    // weights over {same, split, merge}, used by the ByTransition strategy
    std::array<double, 3> split_merge_profile{};
    PhantomStrategy strategy = PhantomStrategy::ByErrorType;

    void validate() const {
        auto near_one = [](double x) { return std::abs(x - 1.0) < 1e-9; };
        if (p_unchanged < 0 || p_replaced < 0 || p_phantom < 0 ||
            !near_one(p_unchanged + p_replaced + p_phantom))
            throw data_error("behavior probabilities must be non-negative and sum to 1");
        if (p_phantom > 0) {
            double s = 0;
            if (strategy == PhantomStrategy::ByErrorType)
                for (double w : phantom_profile) s += w;
            else
                for (double w : split_merge_profile) s += w;
            if (!near_one(s))
                throw data_error("phantom profile weights must sum to 1");
        }
    }
};

using SynonymMap = std::map<std::string, std::vector<std::string>>;

// Ground-truth label for one target.
struct PlantedLabel {
    std::uint32_t target_index = 0;
    Outcome outcome = Outcome::Unchanged;
    std::optional<ErrorType> error;          // phantom targets only
    int transition = 0;                      // -1 merge, 0 same, +1 split
    std::vector<TokenId> span_ids;           // planted extended-span ids
    std::string replacement;                 // replaced targets only
    bool synonym_missing = false;            // pseudo-word fallback used
};

struct LabeledOutput {
    std::string doc_id;
    std::string output_text;
    std::vector<TokenId> output_ids;
    std::vector<PlantedLabel> labels;
};

// Seeded synthetic "model": rewrites each target per a drawn behavior and
// emits the full output token-ID sequence with ground-truth labels.
class Simulator {
public:
    Simulator(const Vocabulary& vocab, BehaviorMixture mixture, SynonymMap synonyms,
              const std::unordered_set<std::string>& affixes = default_affixes(),
              const DecodeFilter* filter = nullptr)
        : vocab_(vocab), mixture_(std::move(mixture)), synonyms_(std::move(synonyms)),
          affixes_(affixes), filter_(filter) {
        mixture_.validate();
    }

    LabeledOutput generate(const AnnotatedDoc& doc, std::uint64_t seed) const {
        DetRng doc_rng = DetRng(seed).derive(fnv1a(doc.doc_id));
        Encoding input_enc = vocab_.encode(doc.original_text);
        std::vector<WordSpan> words = split_words(doc.original_text);

        struct Plan {
            PlantedLabel label;
            Candidate cand;            // phantom targets
            ByteRange orig_ext;        // gap + word, original text
        };
        std::vector<Plan> plans;
        plans.reserve(doc.targets.size());

        for (std::uint32_t ti = 0; ti < doc.targets.size(); ++ti) {
            DetRng rng = doc_rng.derive(ti + 1);
            const TargetSpan& t = doc.targets[ti];
            Plan plan;
            plan.label.target_index = ti;
            plan.orig_ext = input_extended_span_of(words, t);
            std::string gap = doc.original_text.substr(plan.orig_ext.begin,
                                                       t.begin - plan.orig_ext.begin);
            std::vector<TokenId> in_span =
                extract_token_span(input_enc, plan.orig_ext);

            double r = rng.uniform();
            enum { kUnchanged, kReplaced, kPhantom } behavior =
                r < mixture_.p_unchanged ? kUnchanged
                : r < mixture_.p_unchanged + mixture_.p_replaced ? kReplaced
                                                                 : kPhantom;
            if (behavior == kPhantom) {
                auto planted = plan_phantom(t.word, gap, in_span, rng, plan.cand,
                                            plan.label);
                if (planted == PlantResult::FallbackUnchanged) behavior = kUnchanged;
                else if (planted == PlantResult::ForcedReplace) behavior = kReplaced;
            }
            if (behavior == kUnchanged && filter_ && !filter_->allows_sequence(in_span))
                behavior = kReplaced; // even copying would emit a blocked id
            if (behavior == kUnchanged) {
                plan.label.outcome = Outcome::Unchanged;
                plan.label.span_ids = in_span;
            } else if (behavior == kReplaced) {
                plan.label.outcome = Outcome::Replaced;
                plan.label.replacement =
                    pick_replacement(t.word, rng, plan.label.synonym_missing);
            }
            plans.push_back(std::move(plan));
        }

        // Rebuild the text with replacements and gap edits, tracking each
        // target's extended span in the new text.
        std::string out_text;
        std::vector<ByteRange> new_ext(plans.size());
        std::size_t pos = 0;
        for (std::uint32_t ti = 0; ti < plans.size(); ++ti) {
            Plan& p = plans[ti];
            const TargetSpan& t = doc.targets[ti];
            out_text += doc.original_text.substr(pos, p.orig_ext.begin - pos);
            std::uint32_t ext_begin = static_cast<std::uint32_t>(out_text.size());
            std::string gap = doc.original_text.substr(p.orig_ext.begin,
                                                       t.begin - p.orig_ext.begin);
            if (p.label.outcome == Outcome::Different) {
                switch (p.cand.edit) {
                case TextEdit::None: out_text += gap; break;
                case TextEdit::GapNewline:
                    out_text += gap.substr(0, gap.size() - 1);
                    out_text += '\n';
                    break;
                case TextEdit::GapExtraSpace:
                    out_text += gap;
                    out_text += ' ';
                    break;
                }
            } else {
                out_text += gap;
            }
            if (p.label.outcome == Outcome::Replaced)
                out_text += p.label.replacement;
            else
                out_text += t.word;
            new_ext[ti] = {ext_begin, static_cast<std::uint32_t>(out_text.size())};
            pos = p.orig_ext.end;
        }
        out_text += doc.original_text.substr(pos);

        // Canonical encoding of the new text, with phantom spans spliced in.
        Encoding enc = vocab_.encode(out_text);
        LabeledOutput out;
        out.doc_id = doc.doc_id;
        out.output_text = out_text;
        std::size_t tok = 0;
        for (std::uint32_t ti = 0; ti < plans.size(); ++ti) {
            Plan& p = plans[ti];
            if (p.label.outcome != Outcome::Different) {
                if (p.label.outcome == Outcome::Replaced)
                    p.label.span_ids = extract_token_span(enc, new_ext[ti]);
                out.labels.push_back(p.label);
                continue;
            }
            while (tok < enc.ids.size() && enc.offsets[tok].end <= new_ext[ti].begin) {
                out.output_ids.push_back(enc.ids[tok]);
                ++tok;
            }
            if (tok >= enc.ids.size() || enc.offsets[tok].begin != new_ext[ti].begin)
                throw data_error("vocabulary does not tile the target span cleanly: doc " +
                                 doc.doc_id);
            for (TokenId id : p.cand.ids) out.output_ids.push_back(id);
            while (tok < enc.ids.size() && enc.offsets[tok].begin < new_ext[ti].end)
                ++tok;
            if (tok == 0 || enc.offsets[tok - 1].end != new_ext[ti].end)
                throw data_error("vocabulary does not tile the target span cleanly: doc " +
                                 doc.doc_id);
            p.label.span_ids = p.cand.ids;
            out.labels.push_back(p.label);
        }
        for (; tok < enc.ids.size(); ++tok) out.output_ids.push_back(enc.ids[tok]);
        return out;
    }

    // Every token id any phantom candidate could emit for this document's
    // targets, minus the ids already present in the corresponding input span.
    // Blocking all of these guarantees no phantom edit survives filtering.
    std::unordered_set<TokenId> phantom_inventory(const AnnotatedDoc& doc) const {
        std::unordered_set<TokenId> out;
        Encoding input_enc = vocab_.encode(doc.original_text);
        std::vector<WordSpan> words = split_words(doc.original_text);
        for (const TargetSpan& t : doc.targets) {
            ByteRange ext = input_extended_span_of(words, t);
            std::string gap = doc.original_text.substr(ext.begin, t.begin - ext.begin);
            std::vector<TokenId> in_span = extract_token_span(input_enc, ext);
            std::unordered_set<TokenId> in_set(in_span.begin(), in_span.end());
            auto take = [&](const Candidate& c) {
                for (TokenId id : c.ids)
                    if (!in_set.count(id)) out.insert(id);
            };
            for (int e = 0; e < 8; ++e)
                for (const Candidate& c :
                     candidates_for(static_cast<ErrorType>(e), t.word, gap, in_span))
                    take(c);
            for (const auto& pool : transition_candidates_for(t.word, gap, in_span))
                for (const Candidate& c : pool) take(c);
        }
        return out;
    }

    struct CorpusRun {
        std::vector<AnnotatedDoc> used_docs; // last one may be trimmed
        std::vector<LabeledOutput> outputs;
        std::size_t n_trials = 0;
    };

    // Exactly n_trials labeled targets, whole documents first, the final
    // document trimmed to the remaining quota.
    CorpusRun generate_corpus(const std::vector<AnnotatedDoc>& docs, std::uint64_t seed,
                              std::size_t n_trials) const {
        CorpusRun run;
        std::size_t remaining = n_trials;
        for (const AnnotatedDoc& doc : docs) {
            if (remaining == 0) break;
            AnnotatedDoc used = doc;
            if (used.targets.size() > remaining) {
                used.targets.resize(remaining);
                used.bracketed_text = bracket_targets(used.original_text, used.targets);
                used.prompt = build_prompt(used.bracketed_text);
            }
            remaining -= used.targets.size();
            run.outputs.push_back(generate(used, seed));
            run.used_docs.push_back(std::move(used));
        }
        if (remaining > 0)
            throw data_error("corpus exhausted: " + std::to_string(remaining) +
                             " of " + std::to_string(n_trials) + " trials unfilled");
        run.n_trials = n_trials;
        return run;
    }

private:
    enum class TextEdit { None, GapNewline, GapExtraSpace };

    struct Candidate {
        std::vector<TokenId> ids;
        TextEdit edit = TextEdit::None;
        int transition = 0; // word-portion fragment delta sign
        ErrorType type = ErrorType::Other;
    };

    enum class PlantResult { Planted, FallbackUnchanged, ForcedReplace };

    static ByteRange input_extended_span_of(const std::vector<WordSpan>& words,
                                            const TargetSpan& t) {
        std::uint32_t gap_start = 0;
        for (const auto& w : words) {
            if (w.core_begin == t.begin) break;
            gap_start = w.end;
        }
        return {gap_start, t.end};
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xCBF29CE484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001B3ULL;
        }
        return h;
    }

    bool candidate_allowed(const Candidate& c) const {
        return !filter_ || filter_->allows_sequence(c.ids);
    }

    PlantResult plan_phantom(const std::string& word, const std::string& gap,
                             const std::vector<TokenId>& in_span, DetRng& rng,
                             Candidate& chosen, PlantedLabel& label) const {
        if (mixture_.strategy == PhantomStrategy::ByErrorType)
            return plan_by_error_type(word, gap, in_span, rng, chosen, label);
        return plan_by_transition(word, gap, in_span, rng, chosen, label);
    }

    PlantResult plan_by_error_type(const std::string& word, const std::string& gap,
                                   const std::vector<TokenId>& in_span, DetRng& rng,
                                   Candidate& chosen, PlantedLabel& label) const {
        bool any_unfiltered = false;
        std::vector<double> weights(8, 0.0);
        std::vector<const std::vector<Candidate>*> pools(8, nullptr);
        std::vector<std::vector<Candidate>> filtered(8);
        for (int e = 0; e < 8; ++e) {
            if (mixture_.phantom_profile[e] <= 0) continue;
            const auto& cands = candidates_for(static_cast<ErrorType>(e), word, gap, in_span);
            if (cands.empty()) continue;
            any_unfiltered = true;
            for (const Candidate& c : cands)
                if (candidate_allowed(c)) filtered[e].push_back(c);
            if (!filtered[e].empty()) {
                weights[e] = mixture_.phantom_profile[e];
                pools[e] = &filtered[e];
            }
        }
        bool any_allowed = false;
        for (int e = 0; e < 8; ++e)
            if (pools[e]) { any_allowed = true; break; }
        if (!any_unfiltered) return PlantResult::FallbackUnchanged;
        if (!any_allowed) return PlantResult::ForcedReplace;
        std::size_t e = rng.weighted(weights);
        const auto& pool = *pools[e];
        chosen = pool[rng.bounded(pool.size())];
        label.outcome = Outcome::Different;
        label.error = chosen.type;
        label.transition = chosen.transition;
        return PlantResult::Planted;
    }

    PlantResult plan_by_transition(const std::string& word, const std::string& gap,
                                   const std::vector<TokenId>& in_span, DetRng& rng,
                                   Candidate& chosen, PlantedLabel& label) const {
        const auto& by_cat = transition_candidates_for(word, gap, in_span);
        bool any_unfiltered = false;
        std::vector<double> weights(3, 0.0);
        std::vector<std::vector<Candidate>> filtered(3);
        for (int cat = 0; cat < 3; ++cat) {
            if (mixture_.split_merge_profile[cat] <= 0) continue;
            if (by_cat[cat].empty()) continue;
            any_unfiltered = true;
            for (const Candidate& c : by_cat[cat])
                if (candidate_allowed(c)) filtered[cat].push_back(c);
            if (!filtered[cat].empty()) weights[cat] = mixture_.split_merge_profile[cat];
        }
        bool any_allowed = weights[0] + weights[1] + weights[2] > 0;
        if (!any_unfiltered) return PlantResult::FallbackUnchanged;
        if (!any_allowed) return PlantResult::ForcedReplace;
        std::size_t cat = rng.weighted(weights);
        const auto& pool = filtered[cat];
        chosen = pool[rng.bounded(pool.size())];
        label.outcome = Outcome::Different;
        label.error = chosen.type;
        label.transition = chosen.transition;
        return PlantResult::Planted;
    }

    std::string pick_replacement(const std::string& word, DetRng& rng,
                                 bool& synonym_missing) const {
        auto it = synonyms_.find(word);
        if (it != synonyms_.end() && !it->second.empty()) {
            synonym_missing = false;
            return it->second[rng.bounded(it->second.size())];
        }
        synonym_missing = true;
        // deterministic pseudo-word: every letter shifted by one
        std::string out = word;
        for (char& c : out) {
            if (c >= 'a' && c <= 'z') c = static_cast<char>('a' + (c - 'a' + 1) % 26);
            else if (c >= 'A' && c <= 'Z') c = static_cast<char>('A' + (c - 'A' + 1) % 26);
        }
        if (out == word) out += "x";
        return out;
    }

    // ---- candidate construction (memoized per word/gap/type) ----------

    const std::vector<Candidate>& candidates_for(ErrorType type, const std::string& word,
                                                 const std::string& gap,
                                                 const std::vector<TokenId>& in_span) const {
        std::string key = std::string(error_type_name(type)) + "|" + gap + "|" + word;
        auto it = cand_cache_.find(key);
        if (it != cand_cache_.end()) return it->second;
        std::vector<Candidate> cands = build_candidates(type, word, gap, in_span);
        return cand_cache_.emplace(std::move(key), std::move(cands)).first->second;
    }

    const std::array<std::vector<Candidate>, 3>&
    transition_candidates_for(const std::string& word, const std::string& gap,
                              const std::vector<TokenId>& in_span) const {
        std::string key = gap + "|" + word;
        auto it = trans_cache_.find(key);
        if (it != trans_cache_.end()) return it->second;
        std::array<std::vector<Candidate>, 3> by_cat;
        for (Candidate& c : build_transition_candidates(word, gap, in_span)) {
            int cat = c.transition == 0 ? 0 : (c.transition > 0 ? 1 : 2);
            by_cat[cat].push_back(std::move(c));
        }
        return trans_cache_.emplace(std::move(key), std::move(by_cat)).first->second;
    }

    std::vector<TokenId> gap_ids(const std::string& gap) const {
        if (gap.empty()) return {};
        return vocab_.encode(gap).ids;
    }

    std::uint32_t word_fragments(const std::vector<TokenId>& ids) const {
        return fragment_count(vocab_, ids, /*count_gap_tokens=*/false);
    }

    // Verify a candidate and fill in its transition sign and taxonomy label.
    std::optional<Candidate> finish_candidate(std::vector<TokenId> ids, TextEdit edit,
                                              const std::string& word,
                                              const std::vector<TokenId>& in_span,
                                              std::optional<ErrorType> require) const {
        if (ids == in_span) return std::nullopt;
        // surface soundness: word portion must reproduce the word exactly
        std::string surface;
        for (TokenId id : ids) surface += vocab_.token(id);
        std::size_t i = 0;
        while (i < surface.size() && is_ascii_space(static_cast<unsigned char>(surface[i])))
            ++i;
        if (surface.substr(i) != word) return std::nullopt;
        Candidate c;
        c.ids = std::move(ids);
        c.edit = edit;
        c.transition = int(word_fragments(c.ids)) - int(word_fragments(in_span));
        TaxonomyResult tr = classify_error(vocab_, in_span, c.ids, word, affixes_);
        c.type = tr.type;
        if (require && tr.type != *require) return std::nullopt;
        return c;
    }

    std::vector<Candidate> build_candidates(ErrorType type, const std::string& word,
                                            const std::string& gap,
                                            const std::vector<TokenId>& in_span) const {
        std::vector<Candidate> out;
        auto add = [&](std::vector<TokenId> ids, TextEdit edit) {
            if (auto c = finish_candidate(std::move(ids), edit, word, in_span, type))
                out.push_back(std::move(*c));
        };
        auto word_id = vocab_.find(word);
        auto space_word_id = vocab_.find(" " + word);
        auto space_id = vocab_.find(" ");
        auto newline_id = vocab_.find("\n");
        bool single_space_gap = gap == " ";

        switch (type) {
        case ErrorType::E1_WhitespaceBoundaryShift:
            if (single_space_gap && in_span.size() == 1 && word_id &&
                in_span[0] != *word_id)
                add({*word_id}, TextEdit::None);
            break;
        case ErrorType::E2_WhitespaceDetachReattach:
            if (single_space_gap && in_span.size() == 1 && space_id && space_word_id &&
                in_span[0] == *space_word_id) {
                if (word_id) add({*space_id, *word_id}, TextEdit::None); // detachment
                add({*space_id, *space_word_id}, TextEdit::GapExtraSpace); // reattachment
            }
            break;
        case ErrorType::E3_NewlineSubstitution:
            if (single_space_gap && newline_id) {
                std::vector<TokenId> ids{*newline_id};
                if (word_id) {
                    ids.push_back(*word_id);
                } else {
                    for (TokenId id : vocab_.encode(word).ids) ids.push_back(id);
                }
                add(std::move(ids), TextEdit::GapNewline);
            }
            break;
        case ErrorType::E4_IntraWordResegmentation:
            for (auto& seg : plausible_segmentations(word)) {
                if (seg.size() < 2) continue;
                std::vector<TokenId> ids = gap_ids(gap);
                ids.insert(ids.end(), seg.begin(), seg.end());
                add(std::move(ids), TextEdit::None);
            }
            break;
        case ErrorType::E5_ProperNounSegmentation: {
            if (word.size() < 2) break;
            auto initial = vocab_.find(word.substr(0, 1));
            if (!initial) break;
            for (auto& seg : plausible_segmentations(word.substr(1))) {
                std::vector<TokenId> ids = gap_ids(gap);
                ids.push_back(*initial);
                ids.insert(ids.end(), seg.begin(), seg.end());
                add(std::move(ids), TextEdit::None);
            }
            break;
        }
        case ErrorType::E6_MorphologicalSurfacing:
            for (const std::string& affix : affixes_) {
                if (word.size() > affix.size() && word.starts_with(affix)) {
                    auto a = vocab_.find(affix);
                    auto rest = vocab_.find(word.substr(affix.size()));
                    if (a && rest) {
                        std::vector<TokenId> ids = gap_ids(gap);
                        ids.push_back(*a);
                        ids.push_back(*rest);
                        add(std::move(ids), TextEdit::None);
                    }
                }
                if (word.size() > affix.size() && word.ends_with(affix)) {
                    auto a = vocab_.find(affix);
                    auto stem = vocab_.find(word.substr(0, word.size() - affix.size()));
                    if (a && stem) {
                        std::vector<TokenId> ids = gap_ids(gap);
                        ids.push_back(*stem);
                        ids.push_back(*a);
                        add(std::move(ids), TextEdit::None);
                    }
                }
            }
            break;
        case ErrorType::E7_AcronymSplit:
            for (auto& seg : uppercase_segmentations(word)) {
                if (seg.size() < 2) continue;
                std::vector<TokenId> ids = gap_ids(gap);
                ids.insert(ids.end(), seg.begin(), seg.end());
                add(std::move(ids), TextEdit::None);
            }
            break;
        case ErrorType::E8_PluralPossessiveTail: {
            auto s_id = vocab_.find("s");
            if (word.size() >= 2 && word.back() == 's' && s_id) {
                if (auto base = vocab_.find(word.substr(0, word.size() - 1))) {
                    std::vector<TokenId> ids = gap_ids(gap);
                    ids.push_back(*base);
                    ids.push_back(*s_id);
                    add(std::move(ids), TextEdit::None);
                }
            }
            if (word.size() >= 2 && word.front() == 's' && s_id) {
                if (auto rest = vocab_.find(word.substr(1))) {
                    std::vector<TokenId> ids = gap_ids(gap);
                    ids.push_back(*s_id);
                    ids.push_back(*rest);
                    add(std::move(ids), TextEdit::None);
                }
            }
            // trailing-s merge: [.. base, s] -> [initial, rest]
            if (word.size() >= 3 && word.back() == 's') {
                auto initial = vocab_.find(word.substr(0, 1));
                auto rest = vocab_.find(word.substr(1));
                if (initial && rest) {
                    std::vector<TokenId> ids = gap_ids(gap);
                    ids.push_back(*initial);
                    ids.push_back(*rest);
                    add(std::move(ids), TextEdit::None);
                }
            }
            break;
        }
        case ErrorType::Other:
            break;
        }
        return out;
    }

    std::vector<Candidate>
    build_transition_candidates(const std::string& word, const std::string& gap,
                                const std::vector<TokenId>& in_span) const {
        std::vector<Candidate> out;
        auto add = [&](std::vector<TokenId> ids, TextEdit edit) {
            if (auto c = finish_candidate(std::move(ids), edit, word, in_span,
                                          std::nullopt))
                out.push_back(std::move(*c));
        };
        if (gap == " " && in_span.size() == 1) {
            if (auto word_id = vocab_.find(word)) add({*word_id}, TextEdit::None);
        }
        for (auto& seg : plausible_segmentations(word)) {
            std::vector<TokenId> ids = gap_ids(gap);
            ids.insert(ids.end(), seg.begin(), seg.end());
            add(std::move(ids), TextEdit::None);
        }
        return out;
    }

    std::vector<std::vector<TokenId>>
    plausible_segmentations(const std::string& surface) const {
        if (surface.empty()) return {};
        EnumerateOptions opts;
        opts.limit = 4096;
        opts.plausible_only = true;
        try {
            EquivalenceClass cls = enumerate_segmentations(vocab_, surface, opts);
            return std::move(cls.members);
        } catch (const Error&) {
            return {};
        }
    }

    std::vector<std::vector<TokenId>>
    uppercase_segmentations(const std::string& word) const {
        // all segmentations into uppercase-letter group tokens (single
        // capitals allowed), for acronym resegmentation
        std::vector<std::vector<TokenId>> out;
        std::vector<TokenId> path;
        std::vector<std::pair<std::uint32_t, TokenId>> buf;
        std::function<void(std::size_t)> rec = [&](std::size_t pos) {
            if (out.size() >= 1024) return;
            if (pos == word.size()) {
                out.push_back(path);
                return;
            }
            vocab_.trie().matches_at(word, pos, buf);
            auto local = buf;
            for (auto& [len, id] : local) {
                const std::string& tok = vocab_.token(id);
                bool caps = !tok.empty();
                for (unsigned char ch : tok)
                    if (!(ch >= 'A' && ch <= 'Z')) { caps = false; break; }
                if (!caps) continue;
                path.push_back(id);
                rec(pos + len);
                path.pop_back();
            }
        };
        rec(0);
        return out;
    }

    const Vocabulary& vocab_;
    BehaviorMixture mixture_;
    SynonymMap synonyms_;
    std::unordered_set<std::string> affixes_;
    const DecodeFilter* filter_;
    mutable std::unordered_map<std::string, std::vector<Candidate>> cand_cache_;
    mutable std::unordered_map<std::string, std::array<std::vector<Candidate>, 3>>
        trans_cache_;
};

} // namespace phantom
