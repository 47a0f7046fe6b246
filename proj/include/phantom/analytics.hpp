#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "phantom/alignment.hpp"
#include "phantom/error.hpp"
#include "phantom/vocab.hpp"

namespace phantom {

struct OutcomeDistribution {
    std::uint64_t unchanged = 0;
    std::uint64_t replaced = 0;
    std::uint64_t different = 0;
    std::uint64_t discarded = 0; // excluded from class fractions

    std::uint64_t classified_total() const { return unchanged + replaced + different; }

    std::optional<double> fraction(Outcome o) const {
        std::uint64_t total = classified_total();
        if (total == 0) return std::nullopt;
        switch (o) {
        case Outcome::Unchanged: return double(unchanged) / double(total);
        case Outcome::Replaced: return double(replaced) / double(total);
        case Outcome::Different: return double(different) / double(total);
        case Outcome::Discarded: return std::nullopt;
        }
        return std::nullopt;
    }

    void add(Outcome o) {
        switch (o) {
        case Outcome::Unchanged: ++unchanged; break;
        case Outcome::Replaced: ++replaced; break;
        case Outcome::Different: ++different; break;
        case Outcome::Discarded: ++discarded; break;
        }
    }

    void merge(const OutcomeDistribution& other) {
        unchanged += other.unchanged;
        replaced += other.replaced;
        different += other.different;
        discarded += other.discarded;
    }
};

template <typename Trials>
OutcomeDistribution outcome_distribution(const Trials& trials) {
    OutcomeDistribution d;
    for (const Trial& t : trials) d.add(t.outcome);
    return d;
}

// Fragment count of a span: tokens contributing word characters. Gap tokens
// (pure whitespace / newline) are excluded unless count_gap_tokens is set.
inline std::uint32_t fragment_count(const Vocabulary& vocab,
                                    const std::vector<TokenId>& ids,
                                    bool count_gap_tokens = false) {
    std::uint32_t n = 0;
    for (TokenId id : ids)
        if (count_gap_tokens || !is_pure_whitespace(vocab.token(id))) ++n;
    return n;
}

// Input-fragment-count x output-fragment-count grid over Different trials,
// with per-cell word character length sums. Counts above `bounds` land in an
// overflow bucket (the last row/column).
class TransitionMatrix {
public:
    explicit TransitionMatrix(std::uint32_t bounds = 8)
        : bounds_(bounds), counts_((bounds + 1) * (bounds + 1), 0),
          char_sums_((bounds + 1) * (bounds + 1), 0) {}

    std::uint32_t bounds() const { return bounds_; }
    std::uint32_t cells_per_side() const { return bounds_ + 1; }

    void record(std::uint32_t in_frags, std::uint32_t out_frags, std::uint32_t word_chars) {
        std::size_t i = index(in_frags), j = index(out_frags);
        counts_[i * cells_per_side() + j] += 1;
        char_sums_[i * cells_per_side() + j] += word_chars;
        if (in_frags > out_frags) ++merge_count_;
        else if (in_frags < out_frags) ++split_count_;
        else ++same_count_;
    }

    // cell access by fragment count (1-based; bounds+1 = overflow bucket)
    std::uint64_t count(std::uint32_t in_frags, std::uint32_t out_frags) const {
        return counts_[index(in_frags) * cells_per_side() + index(out_frags)];
    }

    std::optional<double> mean_char_length(std::uint32_t in_frags,
                                           std::uint32_t out_frags) const {
        std::uint64_t c = count(in_frags, out_frags);
        if (c == 0) return std::nullopt;
        std::uint64_t s = char_sums_[index(in_frags) * cells_per_side() + index(out_frags)];
        return double(s) / double(c);
    }

    std::uint64_t total() const { return same_count_ + split_count_ + merge_count_; }
    std::uint64_t same_count() const { return same_count_; }
    std::uint64_t split_count() const { return split_count_; }
    std::uint64_t merge_count() const { return merge_count_; }

    // Elementwise addition; sharding must not change the result.
    void merge(const TransitionMatrix& other) {
        if (other.bounds_ != bounds_)
            throw data_error("cannot merge transition matrices with different bounds");
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            counts_[i] += other.counts_[i];
            char_sums_[i] += other.char_sums_[i];
        }
        same_count_ += other.same_count_;
        split_count_ += other.split_count_;
        merge_count_ += other.merge_count_;
    }

    // Delimiter-separated grids, consumable by any plotting tool.
    std::string counts_csv() const { return grid_csv(false); }
    std::string mean_chars_csv() const { return grid_csv(true); }

private:
    std::size_t index(std::uint32_t frags) const {
        if (frags == 0) frags = 1;
        return frags <= bounds_ ? frags - 1 : bounds_;
    }

    std::string grid_csv(bool means) const {
        std::ostringstream out;
        out << "in_frags";
        for (std::uint32_t j = 1; j <= bounds_; ++j) out << ',' << j;
        out << ",overflow\n";
        for (std::uint32_t i = 1; i <= bounds_ + 1; ++i) {
            if (i <= bounds_) out << i;
            else out << "overflow";
            for (std::uint32_t j = 1; j <= bounds_ + 1; ++j) {
                out << ',';
                if (!means) {
                    out << count(i, j);
                } else {
                    auto m = mean_char_length(i, j);
                    if (m) out << *m;
                }
            }
            out << '\n';
        }
        return out.str();
    }

    std::uint32_t bounds_;
    std::vector<std::uint64_t> counts_;
    std::vector<std::uint64_t> char_sums_;
    std::uint64_t same_count_ = 0;
    std::uint64_t split_count_ = 0;
    std::uint64_t merge_count_ = 0;
};

template <typename Trials>
TransitionMatrix transition_matrix(const Vocabulary& vocab, const Trials& trials,
                                   bool count_gap_tokens = false,
                                   std::uint32_t bounds = 8) {
    TransitionMatrix m(bounds);
    for (const Trial& t : trials) {
        if (t.outcome != Outcome::Different) continue;
        std::uint32_t x = fragment_count(vocab, t.input_span_ids, count_gap_tokens);
        std::uint32_t y = fragment_count(vocab, t.output_span_ids, count_gap_tokens);
        m.record(x, y, static_cast<std::uint32_t>(t.input_word.size()));
    }
    return m;
}

struct SplitMergeSummary {
    std::uint64_t same = 0, split = 0, merge = 0;
    double same_fraction = 0, split_fraction = 0, merge_fraction = 0;
};

inline SplitMergeSummary split_merge_summary(const TransitionMatrix& m) {
    if (m.total() == 0) throw data_error("split/merge summary of an empty matrix");
    SplitMergeSummary s;
    s.same = m.same_count();
    s.split = m.split_count();
    s.merge = m.merge_count();
    double total = double(m.total());
    s.same_fraction = double(s.same) / total;
    s.split_fraction = double(s.split) / total;
    s.merge_fraction = double(s.merge) / total;
    return s;
}

} // namespace phantom
