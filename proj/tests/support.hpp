#pragma once

#include "nsbench/corpus.hpp"
#include "nsbench/dataset.hpp"
#include "nsbench/execution.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace nsbench::test {

inline std::filesystem::path source_dir() { return NSBENCH_SOURCE_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() / ("nsbench-" + tag + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::permissions(path_, std::filesystem::perms::owner_all, std::filesystem::perm_options::add, ec);
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline PatentDocument make_doc(std::string id, std::string jurisdiction = "US", std::string language = "en",
                               std::string description = "Background\nA pump.\nDetailed Description\nThe pump moves water.") {
    PatentDocument d;
    d.doc_id = std::move(id);
    d.jurisdiction = std::move(jurisdiction);
    d.language = std::move(language);
    d.ipc_codes = {"F04B 1/00"};
    d.filing_date = Date(2020, 1, 1);
    d.family_id = "F-" + d.doc_id;
    d.title = "Pump";
    d.abstract_text = "A pump.";
    d.claims = "1. A pump.";
    d.description = std::move(description);
    return d;
}

inline QueryCase make_case(std::string id, std::vector<std::string> relevant, std::string language = "en",
                           std::string ipc = "G", std::string jurisdiction = "US") {
    QueryCase q;
    q.query_doc_id = std::move(id);
    for (auto& r : relevant)
        q.relevant.emplace(std::move(r), CitationSource::Examiner);
    q.strata.language = std::move(language);
    q.strata.ipc_section = std::move(ipc);
    q.strata.ipc_class = q.strata.ipc_section + "06F";
    q.strata.jurisdiction = std::move(jurisdiction);
    return q;
}

inline EvaluationDataset make_dataset(std::vector<QueryCase> cases) {
    EvaluationDataset ds;
    std::sort(cases.begin(), cases.end(),
              [](const QueryCase& a, const QueryCase& b) { return a.query_doc_id < b.query_doc_id; });
    ds.queries = std::move(cases);
    ds.manifest.sample_size = ds.queries.size();
    return ds;
}

inline RankedList make_list(std::string query_id, const std::vector<std::string>& ids) {
    RankedList l;
    l.query_id = std::move(query_id);
    for (std::size_t i = 0; i < ids.size(); ++i)
        l.hits.push_back({ids[i], 1.0 / static_cast<double>(i + 1), static_cast<int>(i + 1)});
    return l;
}

// Run over `dataset` carrying its hash; results are filled by the caller.
inline RunRecord make_run(const EvaluationDataset& dataset, std::size_t depth = 100) {
    RunRecord run;
    run.controls.max_depth = depth;
    run.dataset_manifest_hash = dataset_hash(dataset);
    return run;
}

} // namespace nsbench::test
