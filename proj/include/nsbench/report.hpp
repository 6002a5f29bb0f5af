#pragma once

#include "nsbench/dataset.hpp"
#include "nsbench/execution.hpp"
#include "nsbench/metrics.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nsbench {

struct BreakdownRow {
    std::string stratum;
    std::size_t n_queries = 0;
    DetectionCurve curve;
    RecallStats recall;
};

struct BreakdownTable {
    Dimension dimension = Dimension::Language;
    std::vector<BreakdownRow> rows; // n_queries descending, then label
    BreakdownRow totals;
    std::vector<std::string> notes;
};

BreakdownTable breakdown_by(const std::vector<QueryOutcome>& outcomes, const EvaluationDataset& dataset,
                            Dimension dimension, const std::vector<int>& ks,
                            RecallAveraging averaging = RecallAveraging::Micro, std::size_t depth = 0);
BreakdownTable breakdown_by(const RunRecord& run, const EvaluationDataset& dataset, Dimension dimension,
                            const std::vector<int>& ks = kDefaultKGrid, const Matcher& matcher = {},
                            RecallAveraging averaging = RecallAveraging::Micro);

inline constexpr std::string_view kUnknownLanguage = "unknown";

struct CrossLanguageCell {
    std::string query_language;
    std::string relevant_language;
    std::size_t n_pairs = 0;
    std::size_t n_retrieved = 0;
    std::optional<double> recall; // empty when n_pairs == 0

    friend bool operator==(const CrossLanguageCell&, const CrossLanguageCell&) = default;
};

// Full matrix over the observed query languages x relevant-doc languages,
// row-major in label order. Relevant docs missing from the corpus fall under
// kUnknownLanguage.
std::vector<CrossLanguageCell> cross_language_recall(const RunRecord& run, const EvaluationDataset& dataset,
                                                     const Corpus& corpus, const Matcher& matcher = {});

// Metrics of one system under one match rule.
struct SystemReport {
    std::string system;
    MatchRule rule = MatchRule::Exact;
    DetectionCurve curve;
    RecallStats recall;
    std::vector<BreakdownTable> breakdowns;
    std::vector<CrossLanguageCell> cross_language; // empty without a corpus
};

struct ComparisonRow {
    std::string dimension; // "overall" for the whole dataset
    std::string stratum;
    std::size_t n_queries = 0;
    std::string metric; // "top<k>" or "recall"
    double value_a = 0.0;
    double value_b = 0.0;
    double delta = 0.0; // a - b
    std::optional<SignificanceResult> significance;
};

struct ComparisonReport {
    std::string system_a;
    std::string system_b;
    MatchRule rule = MatchRule::Exact;
    std::vector<ComparisonRow> rows;
    std::vector<std::string> warnings;
};

struct ReportOptions {
    std::vector<int> ks = kDefaultKGrid;
    std::vector<Dimension> dimensions{Dimension::Language, Dimension::IpcSection, Dimension::Jurisdiction};
    RecallAveraging averaging = RecallAveraging::Micro;
    BootstrapOptions bootstrap;
};

SystemReport evaluate_system(const RunRecord& run, const EvaluationDataset& dataset, const std::string& system,
                             const Matcher& matcher, const ReportOptions& options,
                             const Corpus* corpus = nullptr);

// Throws IntegrityError unless both runs carry the dataset's hash. Overall rows
// carry paired-bootstrap significance for every k and for recall.
ComparisonReport compare_systems(const RunRecord& run_a, const RunRecord& run_b, const EvaluationDataset& dataset,
                                 const std::string& name_a, const std::string& name_b, const Matcher& matcher,
                                 const ReportOptions& options);

struct MetricsReport {
    std::string dataset_hash;
    std::size_t n_queries = 0;
    std::uint64_t seed = 0;
    std::vector<int> ks = kDefaultKGrid;
    std::vector<Dimension> dimensions;
    RecallAveraging averaging = RecallAveraging::Micro;
    std::size_t recall_depth = 0;
    std::vector<SystemReport> systems;
    std::vector<ComparisonReport> comparisons;
    std::vector<std::string> notes;
};

// Run and corpus are checked against the dataset (IntegrityError). `rule` is
// reported first; with a corpus the other rule is reported alongside it. The
// family rule requires a corpus (std::invalid_argument).
MetricsReport evaluation_report(const RunRecord& run, const std::string& system, const EvaluationDataset& dataset,
                                const Corpus* corpus, MatchRule rule, const ReportOptions& options);

MetricsReport comparison_metrics_report(const RunRecord& run_a, const std::string& name_a, const RunRecord& run_b,
                                        const std::string& name_b, const EvaluationDataset& dataset,
                                        const Corpus* corpus, MatchRule rule, const ReportOptions& options);

enum class ReportFormat { TableText, Csv, Svg };

ReportFormat parse_report_format(std::string_view s); // "table-text", "csv", "svg" / "svg-plot-data"
std::vector<ReportFormat> all_report_formats();

// "17%" when the percentage is whole, else one decimal.
std::string format_percent(double rate);
// Shortest representation that parses back to the same double.
std::string format_number(double v);

std::string render_table(const MetricsReport& report);

// File name -> contents, for every file emit_report would write.
std::vector<std::pair<std::string, std::string>> render_report(const MetricsReport& report,
                                                               const std::vector<ReportFormat>& formats);

// Checks that out_dir is writable before writing anything (IoError otherwise).
// Returns the written paths in order.
std::vector<std::filesystem::path> emit_report(const MetricsReport& report, const std::filesystem::path& out_dir,
                                               const std::vector<ReportFormat>& formats);

} // namespace nsbench
