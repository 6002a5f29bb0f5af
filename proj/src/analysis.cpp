#include "nsbench/report.hpp"

#include "nsbench/error.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace nsbench {

namespace {

constexpr std::string_view kOverall = "overall";
constexpr std::string_view kAll = "all";

std::vector<QueryOutcome> subset(const std::vector<QueryOutcome>& outcomes, const std::vector<std::size_t>& idx) {
    std::vector<QueryOutcome> out;
    out.reserve(idx.size());
    for (auto i : idx)
        out.push_back(outcomes[i]);
    return out;
}

BreakdownRow make_row(std::string label, const std::vector<QueryOutcome>& outcomes, const std::vector<int>& ks,
                      RecallAveraging averaging, std::size_t depth) {
    BreakdownRow row;
    row.stratum = std::move(label);
    row.n_queries = outcomes.size();
    row.curve = detection_curve(outcomes, ks);
    row.recall = recall_stats(outcomes, averaging, depth);
    return row;
}

void check_hash(const RunRecord& run, const std::string& expected, const std::string& name) {
    if (run.dataset_manifest_hash != expected)
        throw IntegrityError("run " + name + " was produced on dataset " + run.dataset_manifest_hash +
                             " but the dataset hashes to " + expected);
}

// a - b computed from integer counts where the metric allows it.
double detection_delta(const DetectionPoint& a, const DetectionPoint& b, std::size_t n) {
    return (static_cast<double>(a.hits) - static_cast<double>(b.hits)) / static_cast<double>(n);
}

double recall_delta(const RecallStats& a, const RecallStats& b) {
    if (a.averaging == RecallAveraging::Micro && a.relevant == b.relevant && a.relevant > 0)
        return (static_cast<double>(a.found) - static_cast<double>(b.found)) / static_cast<double>(a.relevant);
    return a.value - b.value;
}

} // namespace

BreakdownTable breakdown_by(const std::vector<QueryOutcome>& outcomes, const EvaluationDataset& dataset,
                            Dimension dimension, const std::vector<int>& ks, RecallAveraging averaging,
                            std::size_t depth) {
    if (outcomes.size() != dataset.queries.size())
        throw IntegrityError("outcomes do not cover the dataset");
    if (outcomes.empty())
        throw UndefinedMetricError("breakdown undefined for an empty query set");

    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < dataset.queries.size(); ++i)
        groups[dataset.queries[i].strata.get(dimension)].push_back(i);

    BreakdownTable t;
    t.dimension = dimension;
    for (const auto& [label, idx] : groups)
        t.rows.push_back(make_row(label, subset(outcomes, idx), ks, averaging, depth));
    std::stable_sort(t.rows.begin(), t.rows.end(),
                     [](const BreakdownRow& a, const BreakdownRow& b) { return a.n_queries > b.n_queries; });
    t.totals = make_row("total", outcomes, ks, averaging, depth);

    if (dataset.manifest.targets.dimension == dimension)
        for (const auto& [label, share] : dataset.manifest.targets.proportions)
            if (!groups.contains(label))
                t.notes.push_back("stratum '" + label + "' has no queries and is omitted");
    return t;
}

BreakdownTable breakdown_by(const RunRecord& run, const EvaluationDataset& dataset, Dimension dimension,
                            const std::vector<int>& ks, const Matcher& matcher, RecallAveraging averaging) {
    return breakdown_by(query_outcomes(run, dataset, matcher), dataset, dimension, ks, averaging,
                        run.controls.max_depth);
}

std::vector<CrossLanguageCell> cross_language_recall(const RunRecord& run, const EvaluationDataset& dataset,
                                                     const Corpus& corpus, const Matcher& matcher) {
    check_coverage(run, dataset);
    std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>> counts;
    std::set<std::string> rows, cols;
    for (const auto& q : dataset.queries) {
        const auto& list = run.results.find(q.query_doc_id)->second;
        std::set<std::string> retrieved;
        if (list.status == QueryStatus::Ok)
            for (const auto& h : list.hits)
                retrieved.insert(matcher.key(h.doc_id));
        const auto& qlang = q.strata.language;
        rows.insert(qlang);
        cols.insert(qlang);
        for (const auto& [id, source] : q.relevant) {
            const auto* doc = corpus.find(id);
            const std::string rlang = doc ? doc->language : std::string(kUnknownLanguage);
            cols.insert(rlang);
            auto& c = counts[{qlang, rlang}];
            ++c.first;
            c.second += retrieved.contains(matcher.key(id));
        }
    }
    std::vector<CrossLanguageCell> cells;
    for (const auto& r : rows)
        for (const auto& c : cols) {
            CrossLanguageCell cell{r, c, 0, 0, std::nullopt};
            if (auto it = counts.find({r, c}); it != counts.end()) {
                cell.n_pairs = it->second.first;
                cell.n_retrieved = it->second.second;
                cell.recall = static_cast<double>(cell.n_retrieved) / static_cast<double>(cell.n_pairs);
            }
            cells.push_back(std::move(cell));
        }
    return cells;
}

SystemReport evaluate_system(const RunRecord& run, const EvaluationDataset& dataset, const std::string& system,
                             const Matcher& matcher, const ReportOptions& options, const Corpus* corpus) {
    const auto outcomes = query_outcomes(run, dataset, matcher);
    SystemReport r;
    r.system = system;
    r.rule = matcher.rule();
    r.curve = detection_curve(outcomes, options.ks);
    r.recall = recall_stats(outcomes, options.averaging, run.controls.max_depth);
    for (auto d : options.dimensions)
        r.breakdowns.push_back(
            breakdown_by(outcomes, dataset, d, options.ks, options.averaging, run.controls.max_depth));
    if (corpus)
        r.cross_language = cross_language_recall(run, dataset, *corpus, matcher);
    return r;
}

ComparisonReport compare_systems(const RunRecord& run_a, const RunRecord& run_b, const EvaluationDataset& dataset,
                                 const std::string& name_a, const std::string& name_b, const Matcher& matcher,
                                 const ReportOptions& options) {
    const auto expected = dataset_hash(dataset);
    check_hash(run_a, expected, name_a);
    check_hash(run_b, expected, name_b);
    if (dataset.queries.empty())
        throw UndefinedMetricError("comparison undefined for an empty query set");

    const auto oa = query_outcomes(run_a, dataset, matcher);
    const auto ob = query_outcomes(run_b, dataset, matcher);

    ComparisonReport cmp;
    cmp.system_a = name_a;
    cmp.system_b = name_b;
    cmp.rule = matcher.rule();
    std::set<std::string> warnings;

    auto add_rows = [&](std::string dimension, const BreakdownRow& a, const BreakdownRow& b, bool significance) {
        for (std::size_t i = 0; i < a.curve.points.size(); ++i) {
            ComparisonRow row{dimension, a.stratum, a.n_queries, "top" + std::to_string(a.curve.points[i].k),
                              a.curve.points[i].rate, b.curve.points[i].rate,
                              detection_delta(a.curve.points[i], b.curve.points[i], a.n_queries), std::nullopt};
            if (significance) {
                row.significance = paired_bootstrap(oa, ob, dataset, MetricSpec::detection_at(a.curve.points[i].k),
                                                    options.bootstrap);
                warnings.insert(row.significance->warnings.begin(), row.significance->warnings.end());
            }
            cmp.rows.push_back(std::move(row));
        }
        ComparisonRow row{dimension, a.stratum, a.n_queries, "recall", a.recall.value, b.recall.value,
                          recall_delta(a.recall, b.recall), std::nullopt};
        if (significance) {
            row.significance =
                paired_bootstrap(oa, ob, dataset, MetricSpec::recall_metric(options.averaging), options.bootstrap);
            warnings.insert(row.significance->warnings.begin(), row.significance->warnings.end());
        }
        cmp.rows.push_back(std::move(row));
    };

    auto total_a = make_row(std::string(kAll), oa, options.ks, options.averaging, run_a.controls.max_depth);
    auto total_b = make_row(std::string(kAll), ob, options.ks, options.averaging, run_b.controls.max_depth);
    add_rows(std::string(kOverall), total_a, total_b, true);

    for (auto d : options.dimensions) {
        const auto ta = breakdown_by(oa, dataset, d, options.ks, options.averaging, run_a.controls.max_depth);
        const auto tb = breakdown_by(ob, dataset, d, options.ks, options.averaging, run_b.controls.max_depth);
        // Both tables slice the same queries, so rows line up.
        for (std::size_t i = 0; i < ta.rows.size(); ++i)
            add_rows(std::string(to_string(d)), ta.rows[i], tb.rows[i], false);
    }
    cmp.warnings.assign(warnings.begin(), warnings.end());
    return cmp;
}

} // namespace nsbench

namespace nsbench {

namespace {

std::vector<Matcher> matchers_for(const Corpus* corpus, MatchRule rule) {
    if (rule == MatchRule::Family && !corpus)
        throw std::invalid_argument("the family match rule needs a corpus");
    std::vector<Matcher> out;
    if (rule == MatchRule::Exact) {
        out.push_back(Matcher::exact());
        if (corpus)
            out.push_back(Matcher::family(*corpus));
    } else {
        out.push_back(Matcher::family(*corpus));
        out.push_back(Matcher::exact());
    }
    return out;
}

MetricsReport report_shell(const EvaluationDataset& dataset, const Corpus* corpus, const ReportOptions& options,
                           std::size_t depth) {
    if (corpus && corpus->content_hash() != dataset.manifest.corpus_hash)
        throw IntegrityError("corpus hashes to " + corpus->content_hash() + " but the dataset was built from " +
                             dataset.manifest.corpus_hash);
    MetricsReport r;
    r.dataset_hash = dataset_hash(dataset);
    r.n_queries = dataset.queries.size();
    r.seed = options.bootstrap.seed;
    r.ks = options.ks;
    r.dimensions = options.dimensions;
    r.averaging = options.averaging;
    r.recall_depth = depth;
    if (!options.ks.empty() && static_cast<std::size_t>(options.ks.back()) > depth)
        r.notes.push_back("k = " + std::to_string(options.ks.back()) + " exceeds the run depth of " +
                          std::to_string(depth));
    return r;
}

} // namespace

MetricsReport evaluation_report(const RunRecord& run, const std::string& system, const EvaluationDataset& dataset,
                                const Corpus* corpus, MatchRule rule, const ReportOptions& options) {
    auto r = report_shell(dataset, corpus, options, run.controls.max_depth);
    check_hash(run, r.dataset_hash, system);
    for (const auto& m : matchers_for(corpus, rule))
        r.systems.push_back(evaluate_system(run, dataset, system, m, options, corpus));
    return r;
}

MetricsReport comparison_metrics_report(const RunRecord& run_a, const std::string& name_a, const RunRecord& run_b,
                                        const std::string& name_b, const EvaluationDataset& dataset,
                                        const Corpus* corpus, MatchRule rule, const ReportOptions& options) {
    auto r = report_shell(dataset, corpus, options, run_a.controls.max_depth);
    if (run_a.controls.max_depth != run_b.controls.max_depth)
        r.notes.push_back("runs differ in depth (" + std::to_string(run_a.controls.max_depth) + " vs " +
                          std::to_string(run_b.controls.max_depth) + "); recall is not comparable");
    for (const auto& m : matchers_for(corpus, rule)) {
        r.comparisons.push_back(compare_systems(run_a, run_b, dataset, name_a, name_b, m, options));
        r.systems.push_back(evaluate_system(run_a, dataset, name_a, m, options, corpus));
        r.systems.push_back(evaluate_system(run_b, dataset, name_b, m, options, corpus));
    }
    return r;
}

} // namespace nsbench
