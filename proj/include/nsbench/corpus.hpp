#pragma once

#include "nsbench/date.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nsbench {

enum class CitationCategory { X, Y, A, Other };
enum class CitationSource { Examiner, FamilyDerived };

std::string_view to_string(CitationCategory c);
std::string_view to_string(CitationSource s);
CitationCategory parse_category(std::string_view s);
CitationSource parse_source(std::string_view s);

struct PatentDocument {
    std::string doc_id;
    std::string jurisdiction;
    std::string language;
    std::vector<std::string> ipc_codes;
    Date filing_date;
    std::string family_id;
    std::string title;
    std::string abstract_text;
    std::string claims;
    std::string description;

    friend bool operator==(const PatentDocument&, const PatentDocument&) = default;
};

struct CitationRecord {
    std::string citing_id;
    std::string cited_id;
    CitationCategory category = CitationCategory::Other;
    CitationSource source = CitationSource::Examiner;

    friend bool operator==(const CitationRecord&, const CitationRecord&) = default;
};

// Immutable after load; concurrent readers need no synchronization.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(Date reference_date) : reference_date_(reference_date) {}

    // Throws DuplicateIdError if the id is already present.
    void add_document(PatentDocument doc);
    // Citations are kept in canonical (citing, cited, category, source) order.
    void add_citation(CitationRecord citation);

    using DocumentMap = std::map<std::string, PatentDocument, std::less<>>;

    const DocumentMap& documents() const { return documents_; }
    const std::vector<CitationRecord>& citations() const { return citations_; }
    const Date& reference_date() const { return reference_date_; }
    void set_reference_date(Date d) { reference_date_ = d; }

    bool contains(std::string_view doc_id) const;
    const PatentDocument* find(std::string_view doc_id) const;
    // Throws NotFoundError.
    const PatentDocument& at(std::string_view doc_id) const;

    // family_id -> member doc_ids (sorted).
    using FamilyMap = std::map<std::string, std::vector<std::string>, std::less<>>;
    const FamilyMap& families() const { return families_; }

    // SHA-256 over the canonical serialization; independent of insertion order.
    std::string content_hash() const;

    friend bool operator==(const Corpus& a, const Corpus& b);

private:
    DocumentMap documents_;
    std::vector<CitationRecord> citations_;
    FamilyMap families_;
    Date reference_date_;
};

struct LoadOptions {
    bool lenient = false;
};

struct LoadIssue {
    std::size_t line = 0;
    std::string reason;
};

struct LoadReport {
    std::vector<LoadIssue> skipped;
    bool manifest_found = false;
    std::vector<std::string> notes;
};

struct LoadResult {
    Corpus corpus;
    LoadReport report;
};

struct ValidationReport {
    std::size_t doc_count = 0;
    std::size_t citation_count = 0;
    std::vector<CitationRecord> dangling_citations;
    std::vector<std::pair<std::string, std::string>> malformed_docs;
    std::vector<std::pair<std::string, std::string>> empty_sections;

    friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

inline constexpr std::string_view kUnclassified = "unclassified";

// Sidecar manifest path for a corpus file: "<path>.manifest.json".
std::filesystem::path manifest_path_for(const std::filesystem::path& corpus_path);

LoadResult load_corpus(const std::filesystem::path& path, LoadOptions options = {});
// Writes the corpus file and its sidecar manifest.
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);

ValidationReport validate_corpus(const Corpus& corpus);

// Section letter of the first-listed IPC code, or kUnclassified.
std::string ipc_section_of(const PatentDocument& doc);
// Four-character class ("G06F") of the first-listed code, or kUnclassified.
std::string ipc_class_of(const PatentDocument& doc);

// Other members of doc_id's family, ordered by doc_id. Throws NotFoundError.
std::vector<const PatentDocument*> family_members(const Corpus& corpus, std::string_view doc_id);

bool is_iso639_1(std::string_view code);
bool is_well_formed_ipc(std::string_view code);

} // namespace nsbench
