#include "nsbench/remote.hpp"

#include "nsbench/error.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

namespace nsbench {

using nlohmann::json;

namespace {

struct ParsedUrl {
    std::string origin; // scheme://host[:port]
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re))
        throw std::invalid_argument("remote adapter url must be http(s)://host[:port]/path, got '" + url + "'");
    return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

std::string snippet(const std::string& body) {
    constexpr std::size_t limit = 200;
    return body.size() <= limit ? body : body.substr(0, limit) + "...";
}

std::string substitute_token(std::string value, const std::string& token) {
    const std::string marker = "{token}";
    for (auto pos = value.find(marker); pos != std::string::npos; pos = value.find(marker, pos + token.size()))
        value.replace(pos, marker.size(), token);
    return value;
}

const json* find_path(const json& root, const std::string& dotted) {
    const json* cur = &root;
    std::istringstream parts(dotted);
    std::string key;
    while (std::getline(parts, key, '.')) {
        if (!cur->is_object() || !cur->contains(key))
            return nullptr;
        cur = &(*cur)[key];
    }
    return cur;
}

RawResult parse_hits(const RemoteEndpointConfig& cfg, const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error&) {
        return {{}, QueryStatus::Error, "unparseable response body: " + snippet(body)};
    }
    const json* hits = find_path(j, cfg.hits_field);
    if (!hits || !hits->is_array())
        return {{}, QueryStatus::Error, "response lacks array field '" + cfg.hits_field + "'"};
    RawResult raw;
    for (const auto& h : *hits) {
        RawHit hit;
        if (h.is_string()) {
            hit.id = h.get<std::string>();
        } else if (h.is_object()) {
            if (auto it = h.find(cfg.id_field); it != h.end())
                hit.id = it->is_string() ? it->get<std::string>() : it->dump();
            if (!cfg.score_field.empty())
                if (auto it = h.find(cfg.score_field); it != h.end() && it->is_number())
                    hit.score = it->get<double>();
            if (!cfg.rank_field.empty())
                if (auto it = h.find(cfg.rank_field); it != h.end() && it->is_number_integer())
                    hit.rank = it->get<int>();
        }
        // Ids that fail to map are tallied as anomalies during standardization.
        raw.hits.push_back(std::move(hit));
    }
    return raw;
}

} // namespace

RemoteEndpointConfig RemoteEndpointConfig::parse(std::string_view text) {
    RemoteEndpointConfig c;
    try {
        const auto j = json::parse(text);
        c.url = j.at("url").get<std::string>();
        c.name = j.value("name", c.name);
        c.method = j.value("method", c.method);
        if (c.method != "GET" && c.method != "POST")
            throw ParseError("method must be GET or POST");
        if (j.contains("headers"))
            j.at("headers").get_to(c.headers);
        c.auth_token_env = j.value("auth_token_env", "");
        if (j.contains("request")) {
            const auto& r = j.at("request");
            c.query_field = r.value("query_field", c.query_field);
            c.depth_field = r.value("depth_field", c.depth_field);
            c.seed_field = r.value("seed_field", c.seed_field);
            c.language_field = r.value("language_field", c.language_field);
            c.query_id_field = r.value("query_id_field", c.query_id_field);
        }
        if (j.contains("response")) {
            const auto& r = j.at("response");
            c.hits_field = r.value("hits_field", c.hits_field);
            c.id_field = r.value("id_field", c.id_field);
            c.score_field = r.value("score_field", c.score_field);
            c.rank_field = r.value("rank_field", c.rank_field);
        }
        if (j.contains("defaults")) {
            if (!j.at("defaults").is_object())
                throw ParseError("defaults must be an object");
            c.defaults_json = j.at("defaults").dump();
        }
        c.max_retries = j.value("max_retries", c.max_retries);
        c.backoff = std::chrono::milliseconds(j.value("backoff_ms", static_cast<int>(c.backoff.count())));
    } catch (const json::exception& e) {
        throw ParseError(std::string("remote adapter config: ") + e.what());
    }
    if (c.query_field.empty() || c.hits_field.empty() || c.id_field.empty())
        throw ParseError("remote adapter config: query_field, hits_field and id_field are required");
    parse_url(c.url);
    return c;
}

RemoteEndpointConfig RemoteEndpointConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read adapter config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

RawResult remote_adapter_query(const RemoteEndpointConfig& cfg, const Query& query, const RunControls& controls,
                               std::size_t depth) {
    using clock = std::chrono::steady_clock;
    const auto url = parse_url(cfg.url);

    std::string token;
    if (!cfg.auth_token_env.empty())
        if (const char* v = std::getenv(cfg.auth_token_env.c_str()))
            token = v;
    httplib::Headers headers;
    for (const auto& [k, v] : cfg.headers)
        headers.emplace(k, substitute_token(v, token));

    json body = json::parse(cfg.defaults_json);
    body[cfg.query_field] = query.text;
    if (!cfg.depth_field.empty())
        body[cfg.depth_field] = depth;
    if (!cfg.seed_field.empty())
        body[cfg.seed_field] = controls.seed;
    if (!cfg.language_field.empty())
        body[cfg.language_field] = query.language;
    if (!cfg.query_id_field.empty())
        body[cfg.query_id_field] = query.query_id;

    const auto budget = std::chrono::milliseconds(controls.timeout_ms);
    const auto start = clock::now();
    auto backoff = cfg.backoff;
    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        const auto remaining = budget - std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start);
        if (remaining.count() <= 0)
            break;
        httplib::Client cli(url.origin);
        cli.set_connection_timeout(remaining);
        cli.set_read_timeout(remaining);
        cli.set_write_timeout(remaining);

        httplib::Result res{nullptr, httplib::Error::Unknown};
        if (cfg.method == "GET") {
            httplib::Params params;
            for (const auto& [k, v] : body.items())
                params.emplace(k, v.is_string() ? v.get<std::string>() : v.dump());
            res = cli.Get(url.path, params, headers);
        } else {
            res = cli.Post(url.path, headers, body.dump(), "application/json");
        }

        if (res) {
            if (res->status < 200 || res->status >= 300)
                return {{}, QueryStatus::Error, "HTTP " + std::to_string(res->status) + ": " + snippet(res->body)};
            return parse_hits(cfg, res->body);
        }

        last_error = httplib::to_string(res.error());
        const auto elapsed = clock::now() - start;
        if (res.error() == httplib::Error::ConnectionTimeout || elapsed >= budget * 95 / 100)
            return {{}, QueryStatus::Timeout, "timed out after " + std::to_string(controls.timeout_ms) + " ms"};
        if (attempt < cfg.max_retries) {
            const auto left = budget - std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start);
            if (backoff >= left)
                return {{}, QueryStatus::Timeout, "timed out during retry backoff after " + last_error};
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    if (clock::now() - start >= budget)
        return {{}, QueryStatus::Timeout, "timed out after " + std::to_string(controls.timeout_ms) + " ms"};
    return {{}, QueryStatus::Error,
            "transport failure after " + std::to_string(cfg.max_retries + 1) + " attempts: " + last_error};
}

} // namespace nsbench
