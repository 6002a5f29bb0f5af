#include "nsbench/corpus.hpp"

#include "nsbench/error.hpp"
#include "nsbench/hash.hpp"
#include "nsbench/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace nsbench {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 184> kIso639_1 = {
    "aa", "ab", "ae", "af", "ak", "am", "an", "ar", "as", "av", "ay", "az", "ba", "be", "bg", "bh",
    "bi", "bm", "bn", "bo", "br", "bs", "ca", "ce", "ch", "co", "cr", "cs", "cu", "cv", "cy", "da",
    "de", "dv", "dz", "ee", "el", "en", "eo", "es", "et", "eu", "fa", "ff", "fi", "fj", "fo", "fr",
    "fy", "ga", "gd", "gl", "gn", "gu", "gv", "ha", "he", "hi", "ho", "hr", "ht", "hu", "hy", "hz",
    "ia", "id", "ie", "ig", "ii", "ik", "io", "is", "it", "iu", "ja", "jv", "ka", "kg", "ki", "kj",
    "kk", "kl", "km", "kn", "ko", "kr", "ks", "ku", "kv", "kw", "ky", "la", "lb", "lg", "li", "ln",
    "lo", "lt", "lu", "lv", "mg", "mh", "mi", "mk", "ml", "mn", "mr", "ms", "mt", "my", "na", "nb",
    "nd", "ne", "ng", "nl", "nn", "no", "nr", "nv", "ny", "oc", "oj", "om", "or", "os", "pa", "pi",
    "pl", "ps", "pt", "qu", "rm", "rn", "ro", "ru", "rw", "sa", "sc", "sd", "se", "sg", "si", "sk",
    "sl", "sm", "sn", "so", "sq", "sr", "ss", "st", "su", "sv", "sw", "ta", "te", "tg", "th", "ti",
    "tk", "tl", "tn", "to", "tr", "ts", "tt", "tw", "ty", "ug", "uk", "ur", "uz", "ve", "vi", "vo",
    "wa", "wo", "xh", "yi", "yo", "za", "zh", "zu"};

bool citation_less(const CitationRecord& a, const CitationRecord& b) {
    return std::tie(a.citing_id, a.cited_id, a.category, a.source) <
           std::tie(b.citing_id, b.cited_id, b.category, b.source);
}

json patent_to_json(const PatentDocument& d) {
    return json{{"kind", "patent"},
                {"doc_id", d.doc_id},
                {"jurisdiction", d.jurisdiction},
                {"language", d.language},
                {"ipc_codes", d.ipc_codes},
                {"filing_date", d.filing_date.to_string()},
                {"family_id", d.family_id},
                {"title", d.title},
                {"abstract", d.abstract_text},
                {"claims", d.claims},
                {"description", d.description}};
}

json citation_to_json(const CitationRecord& c) {
    return json{{"kind", "citation"},
                {"citing_id", c.citing_id},
                {"cited_id", c.cited_id},
                {"category", to_string(c.category)},
                {"source", to_string(c.source)}};
}

std::string required_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        throw ParseError(std::string("missing field '") + key + "'");
    if (!it->is_string())
        throw ParseError(std::string("field '") + key + "' is not a string");
    return it->get<std::string>();
}

PatentDocument patent_from_json(const json& j) {
    PatentDocument d;
    d.doc_id = required_string(j, "doc_id");
    if (d.doc_id.empty())
        throw ParseError("empty doc_id");
    d.jurisdiction = required_string(j, "jurisdiction");
    d.language = required_string(j, "language");
    auto ipc = j.find("ipc_codes");
    if (ipc == j.end() || !ipc->is_array())
        throw ParseError("field 'ipc_codes' missing or not an array");
    for (const auto& code : *ipc) {
        if (!code.is_string())
            throw ParseError("non-string IPC code");
        d.ipc_codes.push_back(code.get<std::string>());
    }
    d.filing_date = Date::parse(required_string(j, "filing_date"));
    d.family_id = required_string(j, "family_id");
    d.title = required_string(j, "title");
    d.abstract_text = required_string(j, "abstract");
    d.claims = required_string(j, "claims");
    d.description = required_string(j, "description");
    return d;
}

CitationRecord citation_from_json(const json& j) {
    CitationRecord c;
    c.citing_id = required_string(j, "citing_id");
    c.cited_id = required_string(j, "cited_id");
    if (c.citing_id.empty() || c.cited_id.empty())
        throw ParseError("empty citation endpoint");
    if (c.citing_id == c.cited_id)
        throw ParseError("self-citation " + c.citing_id);
    c.category = parse_category(required_string(j, "category"));
    c.source = parse_source(required_string(j, "source"));
    return c;
}

std::string canonical_text(const Corpus& corpus) {
    std::string out = "reference_date=" + corpus.reference_date().to_string() + "\n";
    for (const auto& [id, doc] : corpus.documents())
        out += patent_to_json(doc).dump() + "\n";
    for (const auto& c : corpus.citations())
        out += citation_to_json(c).dump() + "\n";
    return out;
}

} // namespace

std::string_view to_string(CitationCategory c) {
    switch (c) {
    case CitationCategory::X: return "X";
    case CitationCategory::Y: return "Y";
    case CitationCategory::A: return "A";
    case CitationCategory::Other: return "OTHER";
    }
    return "OTHER";
}

std::string_view to_string(CitationSource s) {
    return s == CitationSource::Examiner ? "EXAMINER" : "FAMILY_DERIVED";
}

CitationCategory parse_category(std::string_view s) {
    if (s == "X") return CitationCategory::X;
    if (s == "Y") return CitationCategory::Y;
    if (s == "A") return CitationCategory::A;
    if (s == "OTHER") return CitationCategory::Other;
    throw ParseError("unknown citation category '" + std::string(s) + "'");
}

CitationSource parse_source(std::string_view s) {
    if (s == "EXAMINER") return CitationSource::Examiner;
    if (s == "FAMILY_DERIVED") return CitationSource::FamilyDerived;
    throw ParseError("unknown citation source '" + std::string(s) + "'");
}

void Corpus::add_document(PatentDocument doc) {
    if (documents_.contains(doc.doc_id))
        throw DuplicateIdError(doc.doc_id);
    if (!doc.family_id.empty()) {
        auto& members = families_[doc.family_id];
        members.insert(std::upper_bound(members.begin(), members.end(), doc.doc_id), doc.doc_id);
    }
    std::string key = doc.doc_id;
    documents_.emplace(std::move(key), std::move(doc));
}

void Corpus::add_citation(CitationRecord citation) {
    auto pos = std::upper_bound(citations_.begin(), citations_.end(), citation, citation_less);
    citations_.insert(pos, std::move(citation));
}

bool Corpus::contains(std::string_view doc_id) const { return documents_.find(doc_id) != documents_.end(); }

const PatentDocument* Corpus::find(std::string_view doc_id) const {
    auto it = documents_.find(doc_id);
    return it == documents_.end() ? nullptr : &it->second;
}

const PatentDocument& Corpus::at(std::string_view doc_id) const {
    if (const auto* d = find(doc_id))
        return *d;
    throw NotFoundError("unknown doc_id: " + std::string(doc_id));
}

std::string Corpus::content_hash() const { return sha256_hex(canonical_text(*this)); }

bool operator==(const Corpus& a, const Corpus& b) {
    return a.reference_date_ == b.reference_date_ && a.documents_ == b.documents_ &&
           a.citations_ == b.citations_;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& corpus_path) {
    auto p = corpus_path;
    p += ".manifest.json";
    return p;
}

LoadResult load_corpus(const std::filesystem::path& path, LoadOptions options) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read corpus file " + path.string());

    LoadResult result;
    Corpus& corpus = result.corpus;
    std::vector<std::pair<std::size_t, CitationRecord>> pending;

    auto reject = [&](std::size_t line_no, const std::string& reason) {
        if (!options.lenient)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + reason);
        result.report.skipped.push_back({line_no, reason});
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            reject(line_no, std::string("invalid JSON: ") + e.what());
            continue;
        }
        try {
            if (!j.is_object())
                throw ParseError("record is not an object");
            const std::string kind = required_string(j, "kind");
            if (kind == "patent") {
                // Duplicates are fatal regardless of mode.
                corpus.add_document(patent_from_json(j));
            } else if (kind == "citation") {
                pending.emplace_back(line_no, citation_from_json(j));
            } else {
                throw ParseError("unknown record kind '" + kind + "'");
            }
        } catch (const ParseError& e) {
            reject(line_no, e.what());
        }
    }

    for (auto& [n, c] : pending) {
        if (!corpus.contains(c.citing_id)) {
            reject(n, "citing_id " + c.citing_id + " not in corpus");
            continue;
        }
        corpus.add_citation(std::move(c));
    }

    const auto mpath = manifest_path_for(path);
    std::ifstream min(mpath);
    if (min) {
        result.report.manifest_found = true;
        json m;
        try {
            m = json::parse(min);
            corpus.set_reference_date(Date::parse(required_string(m, "reference_date")));
        } catch (const std::exception& e) {
            throw ParseError("bad corpus manifest " + mpath.string() + ": " + e.what());
        }
        auto check_count = [&](const char* key, std::size_t actual) {
            if (!m.contains(key))
                return;
            const auto expected = m.at(key).get<std::size_t>();
            if (expected == actual)
                return;
            const std::string msg = std::string("manifest ") + key + " " + std::to_string(expected) +
                                    " != loaded " + std::to_string(actual);
            if (!options.lenient)
                throw ParseError(msg);
            result.report.notes.push_back(msg);
        };
        check_count("doc_count", corpus.documents().size());
        check_count("citation_count", corpus.citations().size());
    } else {
        Date latest;
        for (const auto& [id, d] : corpus.documents())
            latest = std::max(latest, d.filing_date);
        corpus.set_reference_date(latest);
        result.report.notes.push_back("no manifest; reference_date set to latest filing date " +
                                      latest.to_string());
    }
    return result;
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write corpus file " + path.string());
    for (const auto& [id, doc] : corpus.documents())
        out << patent_to_json(doc).dump() << '\n';
    for (const auto& c : corpus.citations())
        out << citation_to_json(c).dump() << '\n';

    json manifest = {{"reference_date", corpus.reference_date().to_string()},
                     {"doc_count", corpus.documents().size()},
                     {"citation_count", corpus.citations().size()},
                     {"content_hash", corpus.content_hash()}};
    std::ofstream mout(manifest_path_for(path), std::ios::binary | std::ios::trunc);
    if (!mout)
        throw IoError("cannot write corpus manifest for " + path.string());
    mout << manifest.dump(2) << '\n';
    if (!out || !mout)
        throw IoError("write failed for " + path.string());
}

ValidationReport validate_corpus(const Corpus& corpus) {
    ValidationReport r;
    r.doc_count = corpus.documents().size();
    r.citation_count = corpus.citations().size();
    for (const auto& c : corpus.citations())
        if (!corpus.contains(c.cited_id))
            r.dangling_citations.push_back(c);

    for (const auto& [id, d] : corpus.documents()) {
        if (!is_iso639_1(d.language))
            r.malformed_docs.emplace_back(id, "unrecognized language '" + d.language + "'");
        for (const auto& code : d.ipc_codes)
            if (!is_well_formed_ipc(code))
                r.malformed_docs.emplace_back(id, "malformed IPC code '" + code + "'");
        if (d.filing_date > corpus.reference_date())
            r.malformed_docs.emplace_back(id, "filing_date " + d.filing_date.to_string() +
                                                  " after reference date");
        if (text::trim(d.description).empty())
            r.empty_sections.emplace_back(id, "description");
        if (text::trim(d.claims).empty())
            r.empty_sections.emplace_back(id, "claims");
    }
    return r;
}

std::string ipc_section_of(const PatentDocument& doc) {
    if (doc.ipc_codes.empty())
        return std::string(kUnclassified);
    const auto code = text::trim(doc.ipc_codes.front());
    if (code.empty() || code[0] < 'A' || code[0] > 'H')
        return std::string(kUnclassified);
    return std::string(1, code[0]);
}

std::string ipc_class_of(const PatentDocument& doc) {
    if (doc.ipc_codes.empty())
        return std::string(kUnclassified);
    static const std::regex class_re("^[A-H][0-9]{2}[A-Z]");
    const std::string code(text::trim(doc.ipc_codes.front()));
    std::smatch m;
    if (!std::regex_search(code, m, class_re))
        return std::string(kUnclassified);
    return m.str();
}

std::vector<const PatentDocument*> family_members(const Corpus& corpus, std::string_view doc_id) {
    const auto& doc = corpus.at(doc_id);
    std::vector<const PatentDocument*> out;
    if (doc.family_id.empty())
        return out;
    auto it = corpus.families().find(doc.family_id);
    for (const auto& member : it->second)
        if (member != doc.doc_id)
            out.push_back(&corpus.at(member));
    return out;
}

bool is_iso639_1(std::string_view code) {
    return std::binary_search(kIso639_1.begin(), kIso639_1.end(), code);
}

bool is_well_formed_ipc(std::string_view code) {
    static const std::regex ipc_re("^[A-H]([0-9]{2}([A-Z]( ?[0-9]{1,4}/[0-9]{1,6})?)?)?$");
    return std::regex_match(std::string(code), ipc_re);
}

} // namespace nsbench
