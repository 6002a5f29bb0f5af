#include "nsbench/dataset.hpp"

#include "nsbench/error.hpp"
#include "nsbench/text.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <unordered_map>

namespace nsbench {

namespace {

std::u32string normalized_code_points(const PatentDocument& d) {
    const auto raw = text::decode_utf8(d.claims + " " + d.description);
    std::u32string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char32_t cp : raw) {
        if (text::is_whitespace(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(U' ');
            pending_space = false;
        }
        out.push_back(text::to_lower(cp));
    }
    return out;
}

// Three code points packed into 63 bits; 0x1FFFFF pads short texts.
using GramCounts = std::unordered_map<std::uint64_t, std::uint32_t>;

GramCounts trigrams(const std::u32string& s) {
    constexpr std::uint64_t pad = 0x1FFFFF;
    GramCounts counts;
    auto key = [](std::uint64_t a, std::uint64_t b, std::uint64_t c) { return (a << 42) | (b << 21) | c; };
    if (s.empty())
        return counts;
    if (s.size() < 3) {
        counts[key(s[0], s.size() > 1 ? s[1] : pad, pad)] = 1;
        return counts;
    }
    for (std::size_t i = 0; i + 3 <= s.size(); ++i)
        ++counts[key(s[i], s[i + 1], s[i + 2])];
    return counts;
}

} // namespace

double TrigramJaccardScorer::score(const PatentDocument& a, const PatentDocument& b) const {
    const auto ga = trigrams(normalized_code_points(a));
    const auto gb = trigrams(normalized_code_points(b));
    if (ga.empty() && gb.empty())
        throw UndefinedScoreError("alignment undefined: both " + a.doc_id + " and " + b.doc_id +
                                  " have empty claims and description");
    std::uint64_t inter = 0, uni = 0;
    for (const auto& [k, n] : ga) {
        auto it = gb.find(k);
        const std::uint32_t m = it == gb.end() ? 0 : it->second;
        inter += std::min(n, m);
        uni += std::max(n, m);
    }
    for (const auto& [k, m] : gb)
        if (!ga.contains(k))
            uni += m;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

void TableAlignmentScorer::set(const std::string& a, const std::string& b, double value) {
    table_[a < b ? std::pair{a, b} : std::pair{b, a}] = value;
}

double TableAlignmentScorer::score(const PatentDocument& a, const PatentDocument& b) const {
    const auto key = a.doc_id < b.doc_id ? std::pair{a.doc_id, b.doc_id} : std::pair{b.doc_id, a.doc_id};
    auto it = table_.find(key);
    if (it == table_.end())
        throw UndefinedScoreError("no alignment score for (" + key.first + ", " + key.second + ")");
    return it->second;
}

TableAlignmentScorer TableAlignmentScorer::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read alignment score table " + path.string());
    TableAlignmentScorer scorer("table:" + path.filename().string());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty())
            continue;
        try {
            const auto j = nlohmann::json::parse(line);
            scorer.set(j.at("a").get<std::string>(), j.at("b").get<std::string>(), j.at("score").get<double>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return scorer;
}

AlignmentScore alignment_score(const PatentDocument& a, const PatentDocument& b, const AlignmentScorer& scorer) {
    auto blank = [](const PatentDocument& d) {
        return text::trim(d.description).empty() && text::trim(d.claims).empty();
    };
    if (blank(a) && blank(b))
        throw UndefinedScoreError("alignment undefined: " + a.doc_id + " and " + b.doc_id +
                                  " both lack claims and description");
    const double v = scorer.score(a, b);
    if (!(v >= 0.0 && v <= 1.0))
        throw UndefinedScoreError("scorer " + scorer.id() + " returned out-of-range value " + std::to_string(v));
    return {v, scorer.id()};
}

} // namespace nsbench
