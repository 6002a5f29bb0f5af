#include "nsbench/reference.hpp"

#include "nsbench/error.hpp"
#include "nsbench/text.hpp"

#include <algorithm>
#include <cmath>

namespace nsbench {

std::vector<std::string> tokenize(std::string_view utf8) {
    std::vector<std::string> tokens;
    std::u32string word;
    auto flush = [&] {
        if (!word.empty()) {
            tokens.push_back(text::encode_utf8(word));
            word.clear();
        }
    };
    for (char32_t cp : text::decode_utf8(utf8)) {
        if (text::is_cjk(cp)) {
            flush();
            tokens.push_back(text::encode_utf8(std::u32string(1, cp)));
        } else if (text::is_alnum(cp)) {
            word.push_back(text::to_lower(cp));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

namespace {

std::map<std::string, std::uint32_t, std::less<>> term_frequencies(std::string_view text) {
    std::map<std::string, std::uint32_t, std::less<>> tf;
    for (auto& t : tokenize(text))
        ++tf[std::move(t)];
    return tf;
}

double log_tf(std::uint32_t tf) { return 1.0 + std::log(static_cast<double>(tf)); }

} // namespace

ReferenceIndex ReferenceIndex::build(const Corpus& corpus) {
    ReferenceIndex idx;
    for (const auto& [id, doc] : corpus.documents()) {
        const auto doc_index = static_cast<std::uint32_t>(idx.doc_ids_.size());
        idx.doc_ids_.push_back(id);
        const auto text = preprocess_text(doc.title + "\n" + doc.abstract_text + "\n" + doc.claims + "\n" + doc.description);
        for (const auto& [term, tf] : term_frequencies(text))
            idx.postings_[term].push_back({doc_index, tf});
    }
    std::vector<double> sq(idx.doc_ids_.size(), 0.0);
    for (const auto& [term, plist] : idx.postings_) {
        const double w_idf = std::log(1.0 + static_cast<double>(idx.doc_ids_.size()) / static_cast<double>(plist.size()));
        for (const auto& p : plist) {
            const double w = log_tf(p.tf) * w_idf;
            sq[p.doc] += w * w;
        }
    }
    idx.norms_.resize(sq.size());
    std::transform(sq.begin(), sq.end(), idx.norms_.begin(), [](double v) { return std::sqrt(v); });
    return idx;
}

std::size_t ReferenceIndex::total_postings() const {
    std::size_t n = 0;
    for (const auto& [term, plist] : postings_)
        n += plist.size();
    return n;
}

std::size_t ReferenceIndex::document_frequency(std::string_view term) const {
    const auto* p = postings(term);
    return p ? p->size() : 0;
}

const std::vector<ReferenceIndex::Posting>* ReferenceIndex::postings(std::string_view term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

double ReferenceIndex::idf(std::string_view term) const {
    const auto df = document_frequency(term);
    if (df == 0)
        return 0.0;
    return std::log(1.0 + static_cast<double>(doc_count()) / static_cast<double>(df));
}

RankedList reference_retrieve(const Query& query, const ReferenceIndex& index, std::size_t max_depth) {
    if (text::trim(query.text).empty())
        throw EmptyInputError("query " + query.query_id + " has empty text");

    std::vector<double> acc(index.doc_count(), 0.0);
    double q_sq = 0.0;
    for (const auto& [term, qtf] : term_frequencies(query.text)) {
        const auto* plist = index.postings(term);
        if (!plist)
            continue;
        const double w_idf = index.idf(term);
        const double wq = log_tf(qtf) * w_idf;
        q_sq += wq * wq;
        for (const auto& p : *plist)
            acc[p.doc] += wq * log_tf(p.tf) * w_idf;
    }

    RankedList out;
    out.query_id = query.query_id;
    if (q_sq == 0.0)
        return out;
    const double q_norm = std::sqrt(q_sq);

    std::vector<std::pair<double, std::uint32_t>> scored;
    for (std::uint32_t d = 0; d < acc.size(); ++d) {
        if (acc[d] <= 0.0 || index.doc_id(d) == query.query_id)
            continue;
        scored.emplace_back(acc[d] / (index.doc_norm(d) * q_norm), d);
    }
    auto better = [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; };
    const auto depth = std::min(max_depth, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(depth), scored.end(), better);
    for (std::size_t i = 0; i < depth; ++i)
        out.hits.push_back({index.doc_id(scored[i].second), scored[i].first, static_cast<int>(i + 1)});
    return out;
}

RawResult ReferenceAdapter::search(const Query& query, std::size_t depth, const RunControls&) {
    RawResult raw;
    for (const auto& h : reference_retrieve(query, *index_, depth).hits)
        raw.hits.push_back({h.doc_id, h.score, h.rank});
    return raw;
}

} // namespace nsbench
