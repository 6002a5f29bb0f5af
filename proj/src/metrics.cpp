#include "nsbench/metrics.hpp"

#include "nsbench/error.hpp"

#include <algorithm>
#include <stdexcept>

namespace nsbench {

std::string_view to_string(MatchRule r) { return r == MatchRule::Exact ? "exact" : "family"; }

MatchRule parse_match_rule(std::string_view s) {
    if (s == "exact") return MatchRule::Exact;
    if (s == "family") return MatchRule::Family;
    throw std::invalid_argument("unknown match rule '" + std::string(s) + "'");
}

std::string_view to_string(RecallAveraging a) { return a == RecallAveraging::Micro ? "micro" : "macro"; }

Matcher::Matcher(MatchRule rule, std::map<std::string, std::string, std::less<>> family_of)
    : rule_(rule), family_of_(std::move(family_of)) {}

Matcher Matcher::family(const Corpus& corpus) {
    std::map<std::string, std::string, std::less<>> fam;
    for (const auto& [id, doc] : corpus.documents())
        if (!doc.family_id.empty())
            fam.emplace(id, doc.family_id);
    return Matcher(MatchRule::Family, std::move(fam));
}

std::string Matcher::key(std::string_view doc_id) const {
    if (rule_ == MatchRule::Family)
        if (auto it = family_of_.find(doc_id); it != family_of_.end())
            return "family:" + it->second;
    return "doc:" + std::string(doc_id);
}

std::optional<int> first_relevant_rank(const RankedList& ranked, const std::set<std::string, std::less<>>& relevant,
                                       const Matcher& matcher) {
    if (matcher.rule() == MatchRule::Exact) {
        for (const auto& h : ranked.hits)
            if (relevant.contains(h.doc_id))
                return h.rank;
        return std::nullopt;
    }
    std::set<std::string> keys;
    for (const auto& r : relevant)
        keys.insert(matcher.key(r));
    for (const auto& h : ranked.hits)
        if (keys.contains(matcher.key(h.doc_id)))
            return h.rank;
    return std::nullopt;
}

void check_coverage(const RunRecord& run, const EvaluationDataset& dataset) {
    if (run.results.size() != dataset.queries.size())
        throw IntegrityError("run holds " + std::to_string(run.results.size()) + " results for " +
                             std::to_string(dataset.queries.size()) + " dataset queries");
    for (const auto& q : dataset.queries)
        if (!run.results.contains(q.query_doc_id))
            throw IntegrityError("run has no result for query " + q.query_doc_id);
}

std::vector<QueryOutcome> query_outcomes(const RunRecord& run, const EvaluationDataset& dataset,
                                         const Matcher& matcher) {
    check_coverage(run, dataset);
    std::vector<QueryOutcome> out;
    out.reserve(dataset.queries.size());
    for (const auto& q : dataset.queries) {
        const auto& list = run.results.find(q.query_doc_id)->second;
        QueryOutcome o;
        o.n_relevant = q.relevant.size();
        if (list.status == QueryStatus::Ok) {
            const auto rel = q.relevant_ids();
            o.first_relevant_rank = first_relevant_rank(list, rel, matcher);
            std::set<std::string> retrieved;
            for (const auto& h : list.hits)
                retrieved.insert(matcher.key(h.doc_id));
            for (const auto& r : rel)
                o.n_found += retrieved.contains(matcher.key(r));
        }
        out.push_back(o);
    }
    return out;
}

std::size_t detection_hits(const std::vector<QueryOutcome>& outcomes, int k) {
    return static_cast<std::size_t>(std::count_if(outcomes.begin(), outcomes.end(), [k](const QueryOutcome& o) {
        return o.first_relevant_rank && *o.first_relevant_rank <= k;
    }));
}

double topk_detection_rate(const RunRecord& run, const EvaluationDataset& dataset, int k, const Matcher& matcher) {
    if (k < 1)
        throw std::invalid_argument("k must be at least 1");
    if (dataset.queries.empty())
        throw UndefinedMetricError("detection rate undefined for an empty query set");
    const auto outcomes = query_outcomes(run, dataset, matcher);
    return static_cast<double>(detection_hits(outcomes, k)) / static_cast<double>(outcomes.size());
}

DetectionCurve detection_curve(const std::vector<QueryOutcome>& outcomes, const std::vector<int>& ks) {
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < 1)
            throw std::invalid_argument("k must be at least 1");
        if (i > 0 && ks[i] <= ks[i - 1])
            throw std::invalid_argument("k grid must be strictly increasing");
    }
    if (outcomes.empty())
        throw UndefinedMetricError("detection curve undefined for an empty query set");
    DetectionCurve c;
    c.n_queries = outcomes.size();
    for (int k : ks) {
        const auto hits = detection_hits(outcomes, k);
        c.points.push_back({k, static_cast<double>(hits) / static_cast<double>(outcomes.size()), hits});
    }
    return c;
}

DetectionCurve detection_curve(const RunRecord& run, const EvaluationDataset& dataset, const std::vector<int>& ks,
                               const Matcher& matcher) {
    if (dataset.queries.empty())
        throw UndefinedMetricError("detection curve undefined for an empty query set");
    return detection_curve(query_outcomes(run, dataset, matcher), ks);
}

RecallStats recall_stats(const std::vector<QueryOutcome>& outcomes, RecallAveraging averaging, std::size_t depth) {
    if (outcomes.empty())
        throw UndefinedMetricError("recall undefined for an empty query set");
    RecallStats s;
    s.depth = depth;
    s.averaging = averaging;
    double macro_sum = 0.0;
    for (const auto& o : outcomes) {
        s.found += o.n_found;
        s.relevant += o.n_relevant;
        if (o.n_relevant > 0)
            macro_sum += static_cast<double>(o.n_found) / static_cast<double>(o.n_relevant);
    }
    if (averaging == RecallAveraging::Micro)
        s.value = s.relevant == 0 ? 0.0 : static_cast<double>(s.found) / static_cast<double>(s.relevant);
    else
        s.value = macro_sum / static_cast<double>(outcomes.size());
    return s;
}

double recall(const RunRecord& run, const EvaluationDataset& dataset, const Matcher& matcher,
              RecallAveraging averaging) {
    if (dataset.queries.empty())
        throw UndefinedMetricError("recall undefined for an empty query set");
    return recall_stats(query_outcomes(run, dataset, matcher), averaging, run.controls.max_depth).value;
}

} // namespace nsbench
