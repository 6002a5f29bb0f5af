#pragma once

#include "nsbench/corpus.hpp"
#include "nsbench/dataset.hpp"
#include "nsbench/execution.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nsbench {

enum class MatchRule { Exact, Family };

std::string_view to_string(MatchRule r);
MatchRule parse_match_rule(std::string_view s);

// Decides when a retrieved document counts as a relevant one. Under the family
// rule two documents match when they share a family_id; documents unknown to
// the family map only match themselves.
class Matcher {
public:
    Matcher() = default;
    static Matcher exact() { return Matcher{}; }
    static Matcher family(const Corpus& corpus);
    Matcher(MatchRule rule, std::map<std::string, std::string, std::less<>> family_of);

    MatchRule rule() const { return rule_; }
    // Equivalence-class key of a document under this rule.
    std::string key(std::string_view doc_id) const;

private:
    MatchRule rule_ = MatchRule::Exact;
    std::map<std::string, std::string, std::less<>> family_of_;
};

inline const std::vector<int> kDefaultKGrid{1, 3, 5, 10, 20, 30, 50, 100};

// Per-query kernel shared by every metric.
struct QueryOutcome {
    std::optional<int> first_relevant_rank;
    std::size_t n_relevant = 0;
    std::size_t n_found = 0; // relevant docs matched anywhere in the returned list
};

// Smallest rank matching `relevant` under the rule, or nullopt.
std::optional<int> first_relevant_rank(const RankedList& ranked, const std::set<std::string, std::less<>>& relevant,
                                       const Matcher& matcher = {});

// Throws IntegrityError unless the run holds exactly the dataset's query ids.
void check_coverage(const RunRecord& run, const EvaluationDataset& dataset);

// One outcome per dataset query, in dataset order. Non-OK lists count as all-miss.
std::vector<QueryOutcome> query_outcomes(const RunRecord& run, const EvaluationDataset& dataset,
                                         const Matcher& matcher = {});

std::size_t detection_hits(const std::vector<QueryOutcome>& outcomes, int k);

// Fraction of queries with a relevant doc in the top k. Throws UndefinedMetricError
// for an empty dataset and std::invalid_argument for k < 1.
double topk_detection_rate(const RunRecord& run, const EvaluationDataset& dataset, int k, const Matcher& matcher = {});

struct DetectionPoint {
    int k = 0;
    double rate = 0.0;
    std::size_t hits = 0;
};

struct DetectionCurve {
    std::vector<DetectionPoint> points;
    std::size_t n_queries = 0;
};

DetectionCurve detection_curve(const std::vector<QueryOutcome>& outcomes, const std::vector<int>& ks);
DetectionCurve detection_curve(const RunRecord& run, const EvaluationDataset& dataset, const std::vector<int>& ks,
                               const Matcher& matcher = {});

enum class RecallAveraging { Micro, Macro };

std::string_view to_string(RecallAveraging a);

struct RecallStats {
    double value = 0.0;
    std::size_t found = 0;
    std::size_t relevant = 0;
    std::size_t depth = 0;
    RecallAveraging averaging = RecallAveraging::Micro;
};

RecallStats recall_stats(const std::vector<QueryOutcome>& outcomes, RecallAveraging averaging, std::size_t depth);
// Micro: pooled found / pooled relevant. Macro: mean of per-query ratios.
double recall(const RunRecord& run, const EvaluationDataset& dataset, const Matcher& matcher = {},
              RecallAveraging averaging = RecallAveraging::Micro);

// ---------------------------------------------------------------------------
// Stratified paired bootstrap
// ---------------------------------------------------------------------------

struct MetricSpec {
    enum class Kind { DetectionAtK, Recall };
    Kind kind = Kind::DetectionAtK;
    int k = 10;
    RecallAveraging averaging = RecallAveraging::Micro;

    static MetricSpec detection_at(int k) { return {Kind::DetectionAtK, k, RecallAveraging::Micro}; }
    static MetricSpec recall_metric(RecallAveraging a = RecallAveraging::Micro) { return {Kind::Recall, 0, a}; }
    std::string name() const;
};

struct BootstrapOptions {
    std::size_t n_resamples = 10000;
    std::uint64_t seed = 0;
    std::vector<Dimension> strata{Dimension::Language, Dimension::IpcSection};
    // Enumerate every resample with its probability instead of sampling.
    bool exhaustive = false;
    int parallelism = 1;
};

struct SignificanceResult {
    std::string metric_name;
    double observed_diff = 0.0; // metric(A) - metric(B)
    double p_value = 1.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_resamples = 0;
    std::string strata_spec;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

struct WeightedDiff {
    double diff = 0.0;
    double weight = 0.0;
};

// Per-query paired values for a metric of the form sum(num) / sum(den).
struct PairedValues {
    std::vector<double> num_a, den_a, num_b, den_b;
    std::vector<std::string> stratum; // per query
};

PairedValues paired_values(const std::vector<QueryOutcome>& a, const std::vector<QueryOutcome>& b,
                           const EvaluationDataset& dataset, const MetricSpec& metric,
                           const std::vector<Dimension>& strata);

// Strata with fewer than two queries are pooled into one catch-all stratum.
// Returns groups of query indices ordered by stratum label; warnings name merged strata.
std::vector<std::vector<std::size_t>> stratum_groups(const std::vector<std::string>& labels,
                                                     std::vector<std::string>* warnings = nullptr);

// Resampled differences. Random mode: n_resamples draws of weight 1/B, resample b
// drawing from its own stream (seed, b). Exhaustive mode: every distinct
// within-stratum multiset with its exact probability; throws std::invalid_argument
// when that exceeds two million resamples.
std::vector<WeightedDiff> bootstrap_distribution(const PairedValues& values, const BootstrapOptions& options,
                                                 std::vector<std::string>* warnings = nullptr);

// p = min(1, 2 (c + 1) / (B + 1)) with c the number of resampled differences whose
// sign opposes (or is zero relative to) the observed difference; exhaustive mode
// uses the exact probability mass instead. CI = 2.5 / 97.5 percentiles.
SignificanceResult paired_bootstrap(const RunRecord& run_a, const RunRecord& run_b, const EvaluationDataset& dataset,
                                    const MetricSpec& metric, const BootstrapOptions& options,
                                    const Matcher& matcher = {});

SignificanceResult paired_bootstrap(const std::vector<QueryOutcome>& a, const std::vector<QueryOutcome>& b,
                                    const EvaluationDataset& dataset, const MetricSpec& metric,
                                    const BootstrapOptions& options);

} // namespace nsbench
