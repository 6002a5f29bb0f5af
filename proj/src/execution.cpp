#include "nsbench/execution.hpp"

#include "nsbench/parallel.hpp"
#include "nsbench/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <future>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace nsbench {

using nlohmann::json;

std::string_view to_string(QueryStatus s) {
    switch (s) {
    case QueryStatus::Ok: return "OK";
    case QueryStatus::Timeout: return "TIMEOUT";
    case QueryStatus::Error: return "ERROR";
    }
    return "ERROR";
}

QueryStatus parse_status(std::string_view s) {
    if (s == "OK") return QueryStatus::Ok;
    if (s == "TIMEOUT") return QueryStatus::Timeout;
    if (s == "ERROR") return QueryStatus::Error;
    throw ParseError("unknown query status '" + std::string(s) + "'");
}

std::string ranked_list_violation(const RankedList& list) {
    if (list.status != QueryStatus::Ok && !list.hits.empty())
        return "non-OK list carries hits";
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < list.hits.size(); ++i) {
        const auto& h = list.hits[i];
        if (h.rank != static_cast<int>(i + 1))
            return "rank " + std::to_string(h.rank) + " at position " + std::to_string(i + 1);
        if (!seen.insert(h.doc_id).second)
            return "duplicate doc_id " + h.doc_id;
        if (i > 0 && h.score > list.hits[i - 1].score)
            return "score increases at rank " + std::to_string(h.rank);
    }
    return {};
}

void RunControls::validate(std::size_t largest_k) const {
    if (timeout_ms <= 0)
        throw std::invalid_argument("timeout_ms must be positive");
    if (parallelism < 1)
        throw std::invalid_argument("parallelism must be at least 1");
    if (max_depth == 0)
        throw std::invalid_argument("max_depth must be positive");
    if (max_depth < largest_k)
        throw std::invalid_argument("max_depth " + std::to_string(max_depth) + " is below the largest evaluated k " +
                                    std::to_string(largest_k));
}

std::optional<std::string> normalize_doc_id(std::string_view raw) {
    std::string id;
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c)))
            continue;
        id.push_back(c);
    }
    id = text::ascii_upper(id);
    if (id.size() < 3)
        return std::nullopt;
    for (std::size_t i = 0; i < id.size(); ++i) {
        const char c = id[i];
        const bool letter = c >= 'A' && c <= 'Z';
        const bool digit = c >= '0' && c <= '9';
        if (i < 2 ? !letter : !(letter || digit))
            return std::nullopt;
    }
    return id;
}

RankedList standardize_results(std::string query_id, const RawResult& raw, std::size_t max_depth,
                               std::size_t& anomalies, const std::set<std::string, std::less<>>& excluded) {
    RankedList out;
    out.query_id = std::move(query_id);
    out.status = raw.status;
    out.error = raw.error;
    if (raw.status != QueryStatus::Ok)
        return out;

    std::vector<const RawHit*> ordered;
    ordered.reserve(raw.hits.size());
    for (const auto& h : raw.hits)
        ordered.push_back(&h);
    std::stable_sort(ordered.begin(), ordered.end(), [](const RawHit* a, const RawHit* b) {
        if (a->rank.has_value() != b->rank.has_value())
            return a->rank.has_value();
        return a->rank.has_value() && *a->rank < *b->rank;
    });

    const bool any_score = std::any_of(raw.hits.begin(), raw.hits.end(),
                                       [](const RawHit& h) { return h.score && std::isfinite(*h.score); });
    std::set<std::string, std::less<>> seen;
    for (const RawHit* h : ordered) {
        auto id = normalize_doc_id(h->id);
        if (!id) {
            ++anomalies;
            continue;
        }
        if (excluded.contains(*id) || !seen.insert(*id).second)
            continue;
        if (out.hits.size() == max_depth)
            break;
        const int rank = static_cast<int>(out.hits.size() + 1);
        double score;
        if (!any_score)
            score = 1.0 / rank;
        else if (h->score && std::isfinite(*h->score))
            score = *h->score;
        else
            score = out.hits.empty() ? 1.0 : out.hits.back().score;
        if (!out.hits.empty())
            score = std::min(score, out.hits.back().score);
        out.hits.push_back({std::move(*id), score, rank});
    }
    return out;
}

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Runs the adapter on a detached thread so a hung system cannot stall the
// worker past its deadline. The adapter and query are owned by the task.
RawResult call_with_deadline(const std::shared_ptr<SystemAdapter>& adapter, const Query& query, std::size_t depth,
                             const RunControls& controls) {
    auto task = std::make_shared<std::packaged_task<RawResult()>>(
        [adapter, query, depth, controls] { return adapter->search(query, depth, controls); });
    auto fut = task->get_future();
    std::thread([task] { (*task)(); }).detach();
    if (fut.wait_for(std::chrono::milliseconds(controls.timeout_ms)) == std::future_status::timeout)
        return {{}, QueryStatus::Timeout, "timed out after " + std::to_string(controls.timeout_ms) + " ms"};
    try {
        return fut.get();
    } catch (const std::exception& e) {
        return {{}, QueryStatus::Error, e.what()};
    } catch (...) {
        return {{}, QueryStatus::Error, "adapter threw a non-standard exception"};
    }
}

} // namespace

RunRecord run_evaluation(const EvaluationDataset& dataset, const Corpus& corpus, std::shared_ptr<SystemAdapter> adapter,
                         const RunControls& controls, const RunProgress& progress) {
    controls.validate();
    if (!adapter)
        throw std::invalid_argument("run_evaluation: null adapter");

    RunRecord record;
    record.controls = controls;
    record.dataset_manifest_hash = dataset_hash(dataset);
    record.started_at = utc_now();

    const std::size_t n = dataset.queries.size();
    std::vector<std::optional<RankedList>> slots(n);
    std::vector<std::size_t> anomaly_slots(n, 0);
    std::atomic<std::size_t> errors{0};
    std::atomic<bool> aborted{false};
    std::mutex progress_mutex;
    std::size_t done = 0;

    parallel_for(n, controls.parallelism, [&](std::size_t i) {
        if (aborted.load())
            return;
        const auto& qc = dataset.queries[i];
        const auto t0 = std::chrono::steady_clock::now();
        RawResult raw;
        std::set<std::string, std::less<>> excluded{qc.query_doc_id};
        try {
            const auto& doc = corpus.at(qc.query_doc_id);
            if (controls.exclude_family)
                for (const auto* m : family_members(corpus, doc.doc_id))
                    excluded.insert(m->doc_id);
            const Query query = build_query(doc);
            raw = call_with_deadline(adapter, query, controls.max_depth + excluded.size(), controls);
        } catch (const std::exception& e) {
            raw = {{}, QueryStatus::Error, e.what()};
        }
        auto list = standardize_results(qc.query_doc_id, raw, controls.max_depth, anomaly_slots[i], excluded);
        list.latency_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
        if (list.status == QueryStatus::Error && 2 * (++errors) > n)
            aborted.store(true);
        if (progress) {
            std::lock_guard lock(progress_mutex);
            progress(++done, n, list);
        }
        slots[i] = std::move(list);
    });

    for (std::size_t i = 0; i < n; ++i) {
        record.anomalies += anomaly_slots[i];
        if (slots[i])
            record.results.emplace(slots[i]->query_id, std::move(*slots[i]));
    }
    record.finished_at = utc_now();
    if (aborted.load())
        throw RunAbortedError("run aborted: " + std::to_string(errors.load()) + " of " + std::to_string(n) +
                                  " queries failed (more than half)",
                              std::move(record));
    return record;
}

std::string serialize_run_log(const RunRecord& run, bool sanitized) {
    const auto& c = run.controls;
    json header{{"kind", "run_header"},
                {"controls",
                 {{"seed", c.seed},
                  {"timeout_ms", c.timeout_ms},
                  {"max_depth", c.max_depth},
                  {"adapter_id", c.adapter_id},
                  {"parallelism", c.parallelism},
                  {"exclude_family", c.exclude_family}}},
                {"dataset_manifest_hash", run.dataset_manifest_hash},
                {"started_at", sanitized ? "" : run.started_at},
                {"finished_at", sanitized ? "" : run.finished_at},
                {"anomalies", run.anomalies}};
    std::string out = header.dump() + "\n";
    for (const auto& [id, list] : run.results) {
        json hits = json::array();
        for (const auto& h : list.hits)
            hits.push_back({{"doc_id", h.doc_id}, {"score", h.score}, {"rank", h.rank}});
        json rec{{"kind", "result"},
                 {"query_id", id},
                 {"status", to_string(list.status)},
                 {"latency_ms", sanitized ? 0 : list.latency_ms},
                 {"error", list.error},
                 {"hits", hits}};
        out += rec.dump() + "\n";
    }
    return out;
}

RunRecord parse_run_log(std::string_view content) {
    RunRecord run;
    std::istringstream in{std::string(content)};
    std::string line;
    std::size_t n = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty())
            continue;
        try {
            const auto j = json::parse(line);
            const auto kind = j.at("kind").get<std::string>();
            if (kind == "run_header") {
                if (have_header)
                    throw ParseError("duplicate run header");
                const auto& c = j.at("controls");
                c.at("seed").get_to(run.controls.seed);
                c.at("timeout_ms").get_to(run.controls.timeout_ms);
                c.at("max_depth").get_to(run.controls.max_depth);
                c.at("adapter_id").get_to(run.controls.adapter_id);
                c.at("parallelism").get_to(run.controls.parallelism);
                c.at("exclude_family").get_to(run.controls.exclude_family);
                j.at("dataset_manifest_hash").get_to(run.dataset_manifest_hash);
                j.at("started_at").get_to(run.started_at);
                j.at("finished_at").get_to(run.finished_at);
                j.at("anomalies").get_to(run.anomalies);
                have_header = true;
            } else if (kind == "result") {
                RankedList list;
                j.at("query_id").get_to(list.query_id);
                list.status = parse_status(j.at("status").get<std::string>());
                j.at("latency_ms").get_to(list.latency_ms);
                j.at("error").get_to(list.error);
                for (const auto& h : j.at("hits"))
                    list.hits.push_back({h.at("doc_id").get<std::string>(), h.at("score").get<double>(),
                                         h.at("rank").get<int>()});
                if (auto v = ranked_list_violation(list); !v.empty())
                    throw ParseError("result for " + list.query_id + ": " + v);
                auto id = list.query_id;
                if (!run.results.emplace(std::move(id), std::move(list)).second)
                    throw ParseError("duplicate result for query " + j.at("query_id").get<std::string>());
            } else {
                throw ParseError("unknown record kind '" + kind + "'");
            }
        } catch (const json::exception& e) {
            throw ParseError("run log line " + std::to_string(n) + ": " + e.what());
        } catch (const ParseError& e) {
            throw ParseError("run log line " + std::to_string(n) + ": " + e.what());
        }
    }
    if (!have_header)
        throw ParseError("run log has no header record");
    return run;
}

void write_run_log(const std::filesystem::path& path, const RunRecord& run, bool sanitized) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write run log " + path.string());
    out << serialize_run_log(run, sanitized);
    if (!out)
        throw IoError("write failed for " + path.string());
}

RunRecord load_run_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read run log " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_log(buf.str());
}

} // namespace nsbench
