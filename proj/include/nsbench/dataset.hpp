#pragma once

#include "nsbench/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace nsbench {

// ---------------------------------------------------------------------------
// Strata
// ---------------------------------------------------------------------------

enum class Dimension { Language, IpcSection, IpcClass, Jurisdiction };

std::string_view to_string(Dimension d);
// Accepts "language", "ipc" / "ipc_section", "ipc_class", "jurisdiction" / "country".
Dimension parse_dimension(std::string_view s);

struct StratumLabels {
    std::string language;
    std::string ipc_section;
    std::string ipc_class;
    std::string jurisdiction;

    const std::string& get(Dimension d) const;
    static StratumLabels of(const PatentDocument& doc);

    friend bool operator==(const StratumLabels&, const StratumLabels&) = default;
};

// ---------------------------------------------------------------------------
// Query cases and datasets
// ---------------------------------------------------------------------------

struct QueryCase {
    std::string query_doc_id;
    // relevant doc_id -> provenance; the key set is Rel(q).
    std::map<std::string, CitationSource, std::less<>> relevant;
    StratumLabels strata;

    std::set<std::string, std::less<>> relevant_ids() const;
    friend bool operator==(const QueryCase&, const QueryCase&) = default;
};

using CaseMap = std::map<std::string, QueryCase, std::less<>>;
using XCitationMap = std::map<std::string, std::set<std::string>, std::less<>>;

struct DistributionProfile {
    std::map<std::string, double> citation_type_proportions;
    std::map<std::string, std::size_t> language_counts_primary;
    std::map<std::string, std::size_t> language_counts_cited;
    std::map<std::string, std::size_t> jurisdiction_counts;
    std::map<std::string, std::size_t> ipc_section_counts;
    // Share of corpus patents holding at least one resolved examiner X citation.
    double x_patent_fraction = 0.0;

    friend bool operator==(const DistributionProfile&, const DistributionProfile&) = default;
};

struct StratumTargets {
    Dimension dimension = Dimension::Jurisdiction;
    std::map<std::string, double> proportions;

    friend bool operator==(const StratumTargets&, const StratumTargets&) = default;
};

struct DatasetManifest {
    std::uint64_t seed = 0;
    double threshold = 0.90;
    std::string scorer_id;
    int recency_years = 10;
    StratumTargets targets;
    std::size_t sample_size = 0;
    std::string corpus_hash;
    std::map<std::string, std::size_t> allocation;
    std::vector<std::string> filters;
    DistributionProfile profile;
    // Observed, not targeted: fraction of surviving cases with a family-derived relevant doc.
    double family_augmented_fraction = 0.0;
    std::size_t candidate_cases = 0;
    std::size_t filtered_cases = 0;

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct EvaluationDataset {
    DatasetManifest manifest;
    std::vector<QueryCase> queries; // ordered by query_doc_id

    const QueryCase* find(std::string_view query_id) const;
    friend bool operator==(const EvaluationDataset&, const EvaluationDataset&) = default;
};

// ---------------------------------------------------------------------------
// Alignment scoring
// ---------------------------------------------------------------------------

struct AlignmentScore {
    double value = 0.0;
    std::string scorer_id;
};

// Backend computing technical similarity of two family members.
class AlignmentScorer {
public:
    virtual ~AlignmentScorer() = default;
    virtual std::string id() const = 0;
    virtual double score(const PatentDocument& a, const PatentDocument& b) const = 0;
};

// Multiset Jaccard over character 3-grams of lowercased, whitespace-normalized
// claims + " " + description. Texts shorter than three characters form a single gram.
class TrigramJaccardScorer final : public AlignmentScorer {
public:
    std::string id() const override { return "trigram-jaccard-v1"; }
    double score(const PatentDocument& a, const PatentDocument& b) const override;
};

// Scores looked up from a precomputed table (symmetric). Pairs missing from the
// table raise UndefinedScoreError.
class TableAlignmentScorer final : public AlignmentScorer {
public:
    explicit TableAlignmentScorer(std::string id) : id_(std::move(id)) {}
    void set(const std::string& a, const std::string& b, double value);
    std::string id() const override { return id_; }
    double score(const PatentDocument& a, const PatentDocument& b) const override;

    // JSONL rows {"a": id, "b": id, "score": value}; scorer id is "table:<filename>".
    static TableAlignmentScorer load(const std::filesystem::path& path);

private:
    std::string id_;
    std::map<std::pair<std::string, std::string>, double> table_;
};

// Checks the inputs and the backend's output range. Throws UndefinedScoreError.
AlignmentScore alignment_score(const PatentDocument& a, const PatentDocument& b,
                               const AlignmentScorer& scorer);

// ---------------------------------------------------------------------------
// Builder steps
// ---------------------------------------------------------------------------

XCitationMap extract_x_citations(const Corpus& corpus);

DistributionProfile profile_distributions(const Corpus& corpus);

struct AugmentOptions {
    double threshold = 0.90;
    int parallelism = 1;
};

// Throws std::invalid_argument for a threshold outside [0, 1]. Scorer failures
// skip the member and append a message to `warnings` when given.
CaseMap augment_with_family_citations(const Corpus& corpus, const XCitationMap& base,
                                      const AlignmentScorer& scorer, AugmentOptions options = {},
                                      std::vector<std::string>* warnings = nullptr);

struct FilterResult {
    CaseMap cases;
    std::vector<std::pair<std::string, std::string>> excluded; // (doc_id, reason)
};

FilterResult apply_quality_filters(const CaseMap& cases, const Corpus& corpus, int recency_years = 10);

// Hamilton apportionment of `total` seats over `weights`. Ties in the remainder
// go to the lower index.
std::vector<std::size_t> largest_remainder(const std::vector<double>& weights, std::size_t total);

// Per-stratum counts for a stratified sample: largest remainder over the targets,
// capped by availability with the shortfall re-apportioned over uncapped strata.
// Throws InfeasibleTargetsError naming the stratum that cannot be satisfied.
std::map<std::string, std::size_t> allocate_strata(const std::map<std::string, double>& targets,
                                                   const std::map<std::string, std::size_t>& available,
                                                   std::size_t sample_size);

// `manifest` carries the fields set by earlier steps; allocation, targets,
// sample size and seed are filled in here.
EvaluationDataset assemble_dataset(const CaseMap& cases, const DistributionProfile& profile,
                                   const StratumTargets& targets, std::size_t sample_size,
                                   std::uint64_t seed, DatasetManifest manifest = {});

// Empirical proportions of `cases` along a dimension.
StratumTargets empirical_targets(const CaseMap& cases, Dimension dimension);

struct BuildConfig {
    std::uint64_t seed = 0;
    double threshold = 0.90;
    int recency_years = 10;
    int parallelism = 1;
    // Unset: empirical jurisdiction mix of the filtered cases.
    std::optional<StratumTargets> targets;
    // Unset: every filtered case.
    std::optional<std::size_t> sample_size;
};

struct BuildOutcome {
    EvaluationDataset dataset;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, std::string>> excluded;
};

// extract -> profile -> augment -> filter -> assemble.
BuildOutcome build_dataset(const Corpus& corpus, const AlignmentScorer& scorer, const BuildConfig& config);

// ---------------------------------------------------------------------------
// Dataset file
// ---------------------------------------------------------------------------

std::string serialize_dataset(const EvaluationDataset& dataset);
EvaluationDataset parse_dataset(std::string_view content);
void write_dataset(const std::filesystem::path& path, const EvaluationDataset& dataset);
EvaluationDataset load_dataset(const std::filesystem::path& path);
// SHA-256 of the serialized dataset; embedded in run logs.
std::string dataset_hash(const EvaluationDataset& dataset);

} // namespace nsbench
