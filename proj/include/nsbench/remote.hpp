#pragma once

#include "nsbench/execution.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <string>

namespace nsbench {

// Remote adapter configuration (JSON file):
//
//   {
//     "name": "novelty",
//     "url": "http://127.0.0.1:8080/search",
//     "method": "POST",                       // or "GET" (fields sent as query parameters)
//     "headers": {"Authorization": "Bearer {token}"},
//     "auth_token_env": "NSBENCH_TOKEN",      // substituted for {token} in header values
//     "request":  {"query_field": "query", "depth_field": "limit", "seed_field": "seed",
//                  "language_field": "language", "query_id_field": "query_id"},
//     "response": {"hits_field": "results", "id_field": "doc_id",
//                  "score_field": "score", "rank_field": "rank"},
//     "defaults": {"mode": "novelty"}         // extra request fields sent verbatim
//   }
//
// Every request/response field except query_field and hits_field may be empty
// to disable it. hits_field accepts a dotted path. Hits may be objects or bare id strings.
struct RemoteEndpointConfig {
    std::string name = "remote";
    std::string url;
    std::string method = "POST";
    std::map<std::string, std::string> headers;
    std::string auth_token_env;

    std::string query_field = "query";
    std::string depth_field = "limit";
    std::string seed_field = "seed";
    std::string language_field;
    std::string query_id_field;

    std::string hits_field = "results";
    std::string id_field = "doc_id";
    std::string score_field = "score";
    std::string rank_field = "rank";

    std::string defaults_json = "{}";

    int max_retries = 2;
    std::chrono::milliseconds backoff{50};

    static RemoteEndpointConfig load(const std::filesystem::path& path);
    static RemoteEndpointConfig parse(std::string_view json_text);
};

// One request per attempt; transport failures are retried up to max_retries
// times with doubling backoff, all inside the controls.timeout_ms budget.
// Budget exhaustion yields TIMEOUT; a non-2xx reply yields ERROR carrying a
// body snippet.
RawResult remote_adapter_query(const RemoteEndpointConfig& config, const Query& query,
                               const RunControls& controls, std::size_t depth);

class RemoteAdapter final : public SystemAdapter {
public:
    explicit RemoteAdapter(RemoteEndpointConfig config) : config_(std::move(config)) {}
    std::string id() const override { return "remote:" + config_.name; }
    RawResult search(const Query& query, std::size_t depth, const RunControls& controls) override {
        return remote_adapter_query(config_, query, controls, depth);
    }

private:
    RemoteEndpointConfig config_;
};

} // namespace nsbench
