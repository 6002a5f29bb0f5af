#pragma once

#include "nsbench/corpus.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nsbench {

enum class SectionKind { Background, Summary, DetailedDescription, Other };

struct DescriptionSegment {
    SectionKind kind = SectionKind::Other;
    std::string heading; // as written, empty for untitled leading text
    std::string text;    // preprocessed
};

struct DescriptionSections {
    std::string background;
    std::string summary;
    std::string detailed_description;
    std::vector<std::pair<std::string, std::string>> other; // (heading, text)
    // Every segment in document order; the named fields above are views of these.
    std::vector<DescriptionSegment> segments;
};

// Maps normalized heading lines to section kinds. Matching ignores ASCII case
// and a trailing ':' or full-width colon.
class HeadingLexicon {
public:
    // English and Chinese standard headings.
    static const HeadingLexicon& standard();

    void add(std::string heading, SectionKind kind);
    std::optional<SectionKind> match(std::string_view line) const;

private:
    std::map<std::string, SectionKind, std::less<>> entries_;
};

struct Query {
    std::string query_id;
    std::string text;
    std::string language;
    std::size_t char_length = 0;
    bool truncated = false;
};

inline constexpr std::size_t kDefaultMaxQueryChars = 6000;

// Strips control characters and markup tags, collapses whitespace to single
// spaces, trims, and normalizes to NFC. Idempotent.
std::string preprocess_text(std::string_view raw);

// Throws EmptyInputError for an empty description. Headingless descriptions go
// wholly to detailed_description.
DescriptionSections parse_description(const PatentDocument& doc,
                                      const HeadingLexicon& lexicon = HeadingLexicon::standard());

// Background and detailed description joined by a blank line; falls back to
// all segments when both are empty. Throws EmptyInputError if nothing remains.
std::string extract_key_sections(const DescriptionSections& sections);

// Cuts `text` to at most max_chars code points, preferring the last sentence
// end, then the last space. Returns the text unchanged if it already fits.
std::string truncate_at_sentence(std::string_view text, std::size_t max_chars);

Query build_query(const PatentDocument& doc, std::size_t max_chars = kDefaultMaxQueryChars);

} // namespace nsbench
