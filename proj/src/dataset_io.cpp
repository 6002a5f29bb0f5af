#include "nsbench/dataset.hpp"

#include "nsbench/error.hpp"
#include "nsbench/hash.hpp"
#include "nsbench/text.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace nsbench {

using nlohmann::json;

namespace {

json profile_to_json(const DistributionProfile& p) {
    return json{{"citation_type_proportions", p.citation_type_proportions},
                {"language_counts_primary", p.language_counts_primary},
                {"language_counts_cited", p.language_counts_cited},
                {"jurisdiction_counts", p.jurisdiction_counts},
                {"ipc_section_counts", p.ipc_section_counts},
                {"x_patent_fraction", p.x_patent_fraction}};
}

DistributionProfile profile_from_json(const json& j) {
    DistributionProfile p;
    j.at("citation_type_proportions").get_to(p.citation_type_proportions);
    j.at("language_counts_primary").get_to(p.language_counts_primary);
    j.at("language_counts_cited").get_to(p.language_counts_cited);
    j.at("jurisdiction_counts").get_to(p.jurisdiction_counts);
    j.at("ipc_section_counts").get_to(p.ipc_section_counts);
    j.at("x_patent_fraction").get_to(p.x_patent_fraction);
    return p;
}

json manifest_to_json(const DatasetManifest& m) {
    return json{{"kind", "manifest"},
                {"seed", m.seed},
                {"threshold", m.threshold},
                {"scorer_id", m.scorer_id},
                {"recency_years", m.recency_years},
                {"targets", {{"dimension", to_string(m.targets.dimension)}, {"proportions", m.targets.proportions}}},
                {"sample_size", m.sample_size},
                {"corpus_hash", m.corpus_hash},
                {"allocation", m.allocation},
                {"filters", m.filters},
                {"profile", profile_to_json(m.profile)},
                {"family_augmented_fraction", m.family_augmented_fraction},
                {"candidate_cases", m.candidate_cases},
                {"filtered_cases", m.filtered_cases}};
}

DatasetManifest manifest_from_json(const json& j) {
    DatasetManifest m;
    j.at("seed").get_to(m.seed);
    j.at("threshold").get_to(m.threshold);
    j.at("scorer_id").get_to(m.scorer_id);
    j.at("recency_years").get_to(m.recency_years);
    m.targets.dimension = parse_dimension(j.at("targets").at("dimension").get<std::string>());
    j.at("targets").at("proportions").get_to(m.targets.proportions);
    j.at("sample_size").get_to(m.sample_size);
    j.at("corpus_hash").get_to(m.corpus_hash);
    j.at("allocation").get_to(m.allocation);
    j.at("filters").get_to(m.filters);
    m.profile = profile_from_json(j.at("profile"));
    j.at("family_augmented_fraction").get_to(m.family_augmented_fraction);
    j.at("candidate_cases").get_to(m.candidate_cases);
    j.at("filtered_cases").get_to(m.filtered_cases);
    return m;
}

json query_to_json(const QueryCase& q) {
    json rel = json::object();
    for (const auto& [id, src] : q.relevant)
        rel[id] = to_string(src);
    return json{{"kind", "query"},
                {"query_doc_id", q.query_doc_id},
                {"relevant", rel},
                {"strata",
                 {{"language", q.strata.language},
                  {"ipc_section", q.strata.ipc_section},
                  {"ipc_class", q.strata.ipc_class},
                  {"jurisdiction", q.strata.jurisdiction}}}};
}

QueryCase query_from_json(const json& j) {
    QueryCase q;
    j.at("query_doc_id").get_to(q.query_doc_id);
    for (const auto& [id, src] : j.at("relevant").items())
        q.relevant.emplace(id, parse_source(src.get<std::string>()));
    const auto& s = j.at("strata");
    s.at("language").get_to(q.strata.language);
    s.at("ipc_section").get_to(q.strata.ipc_section);
    s.at("ipc_class").get_to(q.strata.ipc_class);
    s.at("jurisdiction").get_to(q.strata.jurisdiction);
    if (q.relevant.empty())
        throw ParseError("query " + q.query_doc_id + " has an empty relevant set");
    if (q.relevant.contains(q.query_doc_id))
        throw ParseError("query " + q.query_doc_id + " lists itself as relevant");
    return q;
}

} // namespace

std::string serialize_dataset(const EvaluationDataset& dataset) {
    std::string out = manifest_to_json(dataset.manifest).dump() + "\n";
    for (const auto& q : dataset.queries)
        out += query_to_json(q).dump() + "\n";
    return out;
}

EvaluationDataset parse_dataset(std::string_view content) {
    EvaluationDataset ds;
    std::istringstream in{std::string(content)};
    std::string line;
    std::size_t n = 0;
    bool have_manifest = false;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty())
            continue;
        try {
            const auto j = json::parse(line);
            const auto kind = j.at("kind").get<std::string>();
            if (kind == "manifest") {
                if (have_manifest || n != 1)
                    throw ParseError("manifest must be the single leading record");
                ds.manifest = manifest_from_json(j);
                have_manifest = true;
            } else if (kind == "query") {
                ds.queries.push_back(query_from_json(j));
            } else {
                throw ParseError("unknown record kind '" + kind + "'");
            }
        } catch (const json::exception& e) {
            throw ParseError("dataset line " + std::to_string(n) + ": " + e.what());
        } catch (const ParseError& e) {
            throw ParseError("dataset line " + std::to_string(n) + ": " + e.what());
        }
    }
    if (!have_manifest)
        throw ParseError("dataset has no manifest record");
    for (std::size_t i = 1; i < ds.queries.size(); ++i)
        if (!(ds.queries[i - 1].query_doc_id < ds.queries[i].query_doc_id))
            throw ParseError("dataset queries are not strictly ordered by query_doc_id");
    return ds;
}

void write_dataset(const std::filesystem::path& path, const EvaluationDataset& dataset) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write dataset " + path.string());
    out << serialize_dataset(dataset);
    if (!out)
        throw IoError("write failed for " + path.string());
}

EvaluationDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read dataset " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str());
}

std::string dataset_hash(const EvaluationDataset& dataset) { return sha256_hex(serialize_dataset(dataset)); }

} // namespace nsbench
