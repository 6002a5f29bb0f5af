#pragma once

#include "nsbench/corpus.hpp"
#include "nsbench/dataset.hpp"
#include "nsbench/error.hpp"
#include "nsbench/query.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace nsbench {

enum class QueryStatus { Ok, Timeout, Error };

std::string_view to_string(QueryStatus s);
QueryStatus parse_status(std::string_view s);

struct Hit {
    std::string doc_id;
    double score = 0.0;
    int rank = 0;

    friend bool operator==(const Hit&, const Hit&) = default;
};

// Standardized result list: ranks 1..n contiguous, unique doc_ids, scores
// non-increasing in rank. Non-OK lists have no hits.
struct RankedList {
    std::string query_id;
    std::vector<Hit> hits;
    QueryStatus status = QueryStatus::Ok;
    std::int64_t latency_ms = 0;
    std::string error;

    friend bool operator==(const RankedList&, const RankedList&) = default;
};

// Empty string when `list` satisfies the RankedList invariants, else the first violation.
std::string ranked_list_violation(const RankedList& list);

struct RunControls {
    std::uint64_t seed = 0;
    std::int64_t timeout_ms = 30000;
    std::size_t max_depth = 100;
    std::string adapter_id = "reference";
    int parallelism = 1;
    // Drop the query patent's family members from its results (the query patent itself is always dropped).
    bool exclude_family = true;

    // Throws std::invalid_argument. `largest_k` is the deepest cutoff to be evaluated.
    void validate(std::size_t largest_k = 0) const;

    friend bool operator==(const RunControls&, const RunControls&) = default;
};

struct RunRecord {
    RunControls controls;
    std::string dataset_manifest_hash;
    std::map<std::string, RankedList, std::less<>> results;
    std::string started_at;
    std::string finished_at;
    // Hits dropped because their identifier could not be mapped.
    std::size_t anomalies = 0;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// ---------------------------------------------------------------------------
// Adapter contract
// ---------------------------------------------------------------------------

struct RawHit {
    std::string id;
    std::optional<double> score;
    std::optional<int> rank;
};

struct RawResult {
    std::vector<RawHit> hits;
    QueryStatus status = QueryStatus::Ok;
    std::string error;
};

// A system under test. search() may be called concurrently from several workers.
// Throwing counts as a hard failure of that query.
class SystemAdapter {
public:
    virtual ~SystemAdapter() = default;
    virtual std::string id() const = 0;
    virtual RawResult search(const Query& query, std::size_t depth, const RunControls& controls) = 0;
};

// Uppercase with all whitespace removed; nullopt unless the result is two
// letters followed by letters/digits.
std::optional<std::string> normalize_doc_id(std::string_view raw);

// Orders by explicit rank when present (input order otherwise), normalizes ids,
// drops `excluded` ids, keeps the first occurrence of duplicates, enforces
// non-increasing scores, truncates to max_depth and renumbers ranks from 1.
// Unmappable ids are dropped and counted in `anomalies`.
RankedList standardize_results(std::string query_id, const RawResult& raw, std::size_t max_depth,
                               std::size_t& anomalies, const std::set<std::string, std::less<>>& excluded = {});

class RunAbortedError : public Error {
public:
    RunAbortedError(const std::string& what, RunRecord partial) : Error(what), partial_(std::move(partial)) {}
    const RunRecord& partial() const { return partial_; }

private:
    RunRecord partial_;
};

// Attempts every dataset query once on a pool of controls.parallelism workers.
// Queries whose adapter call exceeds timeout_ms are recorded as TIMEOUT. Once
// more than half of all queries have hard-failed (ERROR) no further queries are
// dispatched and RunAbortedError is thrown.
// `progress`, when set, is called once per finished query (serialized).
using RunProgress = std::function<void(std::size_t done, std::size_t total, const RankedList& list)>;

RunRecord run_evaluation(const EvaluationDataset& dataset, const Corpus& corpus,
                         std::shared_ptr<SystemAdapter> adapter, const RunControls& controls,
                         const RunProgress& progress = {});

// ---------------------------------------------------------------------------
// Run log
// ---------------------------------------------------------------------------

// Sanitized logs blank timestamps and latencies so reruns compare byte-for-byte.
std::string serialize_run_log(const RunRecord& run, bool sanitized = false);
RunRecord parse_run_log(std::string_view content);
void write_run_log(const std::filesystem::path& path, const RunRecord& run, bool sanitized = false);
RunRecord load_run_log(const std::filesystem::path& path);

} // namespace nsbench
