#pragma once

#include "nsbench/corpus.hpp"
#include "nsbench/execution.hpp"
#include "nsbench/query.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace nsbench {

// Lowercased alphanumeric runs; each Han/Kana/Hangul character is its own token.
std::vector<std::string> tokenize(std::string_view text);

// Inverted index over title + abstract + claims + description (preprocessed).
//
// Scoring is cosine similarity of log-tf * idf vectors:
//   idf(t)    = ln(1 + N / df(t))
//   w(t, x)   = (1 + ln tf(t, x)) * idf(t)
//   score(q,d)= sum_t w(t,q) w(t,d) / (|d| |q|)
// where |d| runs over all terms of d and |q| over the query terms present in
// the index. Sums run in lexicographic term order.
class ReferenceIndex {
public:
    struct Posting {
        std::uint32_t doc = 0;
        std::uint32_t tf = 0;
    };

    static ReferenceIndex build(const Corpus& corpus);

    std::size_t doc_count() const { return doc_ids_.size(); }
    const std::string& doc_id(std::uint32_t doc) const { return doc_ids_[doc]; }
    std::size_t term_count() const { return postings_.size(); }
    std::size_t total_postings() const;
    std::size_t document_frequency(std::string_view term) const;
    // nullptr for unknown terms.
    const std::vector<Posting>* postings(std::string_view term) const;
    double idf(std::string_view term) const;
    double doc_norm(std::uint32_t doc) const { return norms_[doc]; }

private:
    std::vector<std::string> doc_ids_; // sorted; doc index order == doc_id order
    std::map<std::string, std::vector<Posting>, std::less<>> postings_;
    std::vector<double> norms_;
};

inline ReferenceIndex build_reference_index(const Corpus& corpus) { return ReferenceIndex::build(corpus); }

// Top max_depth documents with positive score, excluding the query document.
// Ties go to the lexicographically smaller doc_id. Throws EmptyInputError.
RankedList reference_retrieve(const Query& query, const ReferenceIndex& index, std::size_t max_depth);

class ReferenceAdapter final : public SystemAdapter {
public:
    explicit ReferenceAdapter(std::shared_ptr<const ReferenceIndex> index) : index_(std::move(index)) {}
    std::string id() const override { return "reference"; }
    RawResult search(const Query& query, std::size_t depth, const RunControls& controls) override;

private:
    std::shared_ptr<const ReferenceIndex> index_;
};

} // namespace nsbench
