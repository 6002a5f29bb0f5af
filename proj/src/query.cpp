#include "nsbench/query.hpp"

#include "nsbench/error.hpp"
#include "nsbench/text.hpp"

#include <stdexcept>

namespace nsbench {

namespace {

bool is_tag_start(char32_t c) {
    return (c >= U'A' && c <= U'Z') || (c >= U'a' && c <= U'z') || c == U'/' || c == U'!' || c == U'?';
}

// One left-to-right pass replacing each <tag ...> with a space.
bool strip_tags_once(std::u32string& s) {
    std::u32string out;
    out.reserve(s.size());
    bool changed = false;
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] == U'<' && i + 1 < s.size() && is_tag_start(s[i + 1])) {
            std::size_t j = i + 1;
            while (j < s.size() && s[j] != U'>' && s[j] != U'<')
                ++j;
            if (j < s.size() && s[j] == U'>') {
                out.push_back(U' ');
                i = j + 1;
                changed = true;
                continue;
            }
        }
        out.push_back(s[i++]);
    }
    s.swap(out);
    return changed;
}

bool is_sentence_end(const std::u32string& s, std::size_t i) {
    switch (s[i]) {
    case U'。': case U'！': case U'？': case U'；':
        return true;
    case U'.': case U'!': case U'?':
        return i + 1 == s.size() || s[i + 1] == U' ';
    default:
        return false;
    }
}

std::string join_nonempty(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (p.empty())
            continue;
        if (!out.empty())
            out += "\n\n";
        out += p;
    }
    return out;
}

} // namespace

std::string preprocess_text(std::string_view raw) {
    std::u32string s;
    for (char32_t cp : text::decode_utf8(raw))
        if (!text::is_control(cp))
            s.push_back(cp);
    while (strip_tags_once(s)) {
    }
    std::u32string collapsed;
    collapsed.reserve(s.size());
    bool pending_space = false;
    for (char32_t cp : s) {
        if (text::is_whitespace(cp)) {
            pending_space = !collapsed.empty();
            continue;
        }
        if (pending_space) {
            collapsed.push_back(U' ');
            pending_space = false;
        }
        collapsed.push_back(cp);
    }
    return text::normalize_nfc(text::encode_utf8(collapsed));
}

const HeadingLexicon& HeadingLexicon::standard() {
    static const HeadingLexicon lexicon = [] {
        HeadingLexicon l;
        for (const char* h : {"BACKGROUND", "BACKGROUND ART", "BACKGROUND OF THE INVENTION",
                              "BACKGROUND OF THE DISCLOSURE", "DESCRIPTION OF THE RELATED ART",
                              "背景技术", "背景"})
            l.add(h, SectionKind::Background);
        for (const char* h : {"SUMMARY", "SUMMARY OF THE INVENTION", "BRIEF SUMMARY", "SUMMARY OF THE DISCLOSURE",
                              "DISCLOSURE OF THE INVENTION", "发明内容"})
            l.add(h, SectionKind::Summary);
        for (const char* h : {"DETAILED DESCRIPTION", "DETAILED DESCRIPTION OF THE INVENTION",
                              "DETAILED DESCRIPTION OF THE EMBODIMENTS",
                              "DETAILED DESCRIPTION OF THE PREFERRED EMBODIMENTS", "DESCRIPTION OF EMBODIMENTS",
                              "MODE FOR CARRYING OUT THE INVENTION", "具体实施方式"})
            l.add(h, SectionKind::DetailedDescription);
        for (const char* h : {"TECHNICAL FIELD", "FIELD", "FIELD OF THE INVENTION", "BRIEF DESCRIPTION OF THE DRAWINGS",
                              "技术领域", "附图说明"})
            l.add(h, SectionKind::Other);
        return l;
    }();
    return lexicon;
}

void HeadingLexicon::add(std::string heading, SectionKind kind) { entries_[text::ascii_upper(heading)] = kind; }

std::optional<SectionKind> HeadingLexicon::match(std::string_view line) const {
    std::string key = preprocess_text(line);
    if (key.ends_with(":"))
        key.pop_back();
    else if (key.ends_with("："))
        key.resize(key.size() - std::string_view("：").size());
    key = text::ascii_upper(text::trim(key));
    if (key.empty())
        return std::nullopt;
    auto it = entries_.find(key);
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

DescriptionSections parse_description(const PatentDocument& doc, const HeadingLexicon& lexicon) {
    if (preprocess_text(doc.description).empty())
        throw EmptyInputError("document " + doc.doc_id + " has an empty description");

    struct Raw {
        SectionKind kind;
        std::string heading;
        std::string body;
    };
    std::vector<Raw> raw;
    bool saw_heading = false;
    std::size_t pos = 0;
    const std::string_view desc = doc.description;
    while (pos <= desc.size()) {
        auto nl = desc.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = desc.size();
        const auto line = desc.substr(pos, nl - pos);
        if (auto kind = lexicon.match(line)) {
            saw_heading = true;
            raw.push_back({*kind, preprocess_text(line), {}});
        } else {
            if (raw.empty())
                raw.push_back({SectionKind::Other, {}, {}});
            raw.back().body.append(line).push_back('\n');
        }
        pos = nl + 1;
    }

    DescriptionSections s;
    if (!saw_heading) {
        s.detailed_description = preprocess_text(doc.description);
        s.segments.push_back({SectionKind::DetailedDescription, {}, s.detailed_description});
        return s;
    }

    std::vector<std::string> background, summary, detailed;
    for (auto& r : raw) {
        DescriptionSegment seg{r.kind, r.heading, preprocess_text(r.body)};
        switch (seg.kind) {
        case SectionKind::Background: background.push_back(seg.text); break;
        case SectionKind::Summary: summary.push_back(seg.text); break;
        case SectionKind::DetailedDescription: detailed.push_back(seg.text); break;
        case SectionKind::Other:
            if (!seg.text.empty() || !seg.heading.empty())
                s.other.emplace_back(seg.heading, seg.text);
            break;
        }
        s.segments.push_back(std::move(seg));
    }
    s.background = join_nonempty(background);
    s.summary = join_nonempty(summary);
    s.detailed_description = join_nonempty(detailed);
    return s;
}

std::string extract_key_sections(const DescriptionSections& sections) {
    std::string key = join_nonempty({sections.background, sections.detailed_description});
    if (!key.empty())
        return key;
    std::vector<std::string> all;
    for (const auto& seg : sections.segments)
        all.push_back(seg.text);
    key = join_nonempty(all);
    if (key.empty())
        throw EmptyInputError("description has no non-empty section");
    return key;
}

std::string truncate_at_sentence(std::string_view utf8, std::size_t max_chars) {
    const auto s = text::decode_utf8(utf8);
    if (s.size() <= max_chars)
        return std::string(utf8);
    std::size_t cut = 0;
    for (std::size_t i = max_chars; i-- > 0;)
        if (is_sentence_end(s, i)) {
            cut = i + 1;
            break;
        }
    if (cut == 0)
        for (std::size_t i = max_chars + 1; i-- > 1;)
            if (i < s.size() && s[i] == U' ') {
                cut = i;
                break;
            }
    if (cut == 0)
        cut = max_chars;
    auto head = s.substr(0, cut);
    while (!head.empty() && text::is_whitespace(head.back()))
        head.pop_back();
    return text::encode_utf8(head);
}

Query build_query(const PatentDocument& doc, std::size_t max_chars) {
    if (max_chars == 0)
        throw std::invalid_argument("max_chars must be positive");
    const auto full = preprocess_text(extract_key_sections(parse_description(doc)));
    if (full.empty())
        throw EmptyInputError("query text for " + doc.doc_id + " is empty");
    Query q;
    q.query_id = doc.doc_id;
    q.language = doc.language;
    q.text = truncate_at_sentence(full, max_chars);
    q.char_length = text::code_point_length(q.text);
    q.truncated = q.text.size() != full.size();
    return q;
}

} // namespace nsbench
