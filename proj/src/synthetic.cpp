#include "nsbench/synthetic.hpp"

#include "nsbench/rng.hpp"
#include "nsbench/text.hpp"

#include <array>
#include <cstdio>

namespace nsbench {

namespace {

constexpr std::size_t kSimpleClusters = 35;
constexpr std::size_t kFamilyClusters = 10;
constexpr std::size_t kDistractors = 20;
constexpr std::size_t kStale = 5;
constexpr std::size_t kCrossLanguage = 5;
constexpr std::size_t kDangling = 8;

const std::vector<std::string> kEnFiller{"a",      "the",    "of",     "and",     "to",       "in",
                                         "is",     "for",    "with",   "said",    "wherein",  "comprising",
                                         "device", "method", "system", "unit",    "first",    "second",
                                         "layer",  "module", "signal", "control", "configured", "data"};
const std::vector<std::string> kZhFiller{"的",   "一种", "装置", "方法", "所述", "其中", "包括", "用于",
                                         "第一", "第二", "模块", "信号", "控制", "数据", "系统", "设置"};
const std::array<std::string, 4> kEnHeadings{"Technical Field", "Background", "Summary", "Detailed Description"};
const std::array<std::string, 4> kZhHeadings{"技术领域", "背景技术", "发明内容", "具体实施方式"};

struct Topic {
    std::vector<std::string> en, zh, acronyms;
    std::string ipc;
};

using Sentence = std::vector<std::string>;

struct TextPlan {
    Sentence title;
    std::vector<Sentence> abstract, claims;
    std::array<std::vector<Sentence>, 4> sections;
    bool headings = true;
};

struct Rendered {
    std::string title, abstract_text, claims, description;
};

class Generator {
public:
    explicit Generator(std::uint64_t seed) : rng_(make_stream(seed, label_stream_id("synthetic-corpus"))) {}

    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(uniform_index(rng_, n)); }
    double unit() { return uniform_unit(rng_); }
    template <class T>
    void shuffle(std::vector<T>& v) { shuffle_in_place(v, rng_); }

    Topic topic() {
        static const std::string consonants = "bdfgklmnprstvz";
        static const std::string vowels = "aeiou";
        Topic t;
        for (int i = 0; i < 24; ++i) {
            std::string w;
            for (int s = 0; s < 3; ++s) {
                w += consonants[pick(consonants.size())];
                w += vowels[pick(vowels.size())];
            }
            t.en.push_back(w);
            std::u32string zh;
            for (int c = 0; c < 2; ++c)
                zh.push_back(static_cast<char32_t>(0x4E00 + 0x100 + pick(0x3000)));
            t.zh.push_back(text::encode_utf8(zh));
        }
        for (int i = 0; i < 2; ++i) {
            std::string a;
            for (int c = 0; c < 3; ++c)
                a += static_cast<char>('A' + pick(26));
            a += static_cast<char>('0' + pick(10));
            t.acronyms.push_back(a);
        }
        static const std::string sections = "GGGHHHABCF";
        char ipc[32];
        std::snprintf(ipc, sizeof ipc, "%c%02zu%c %zu/%02zu", sections[pick(sections.size())], 1 + pick(98),
                      static_cast<char>('A' + pick(26)), 1 + pick(98), pick(100));
        t.ipc = ipc;
        return t;
    }

    std::string word(const Topic& t, bool zh) {
        const double u = unit();
        if (u < 0.08)
            return t.acronyms[pick(t.acronyms.size())];
        if (u < 0.58)
            return zh ? t.zh[pick(t.zh.size())] : t.en[pick(t.en.size())];
        return zh ? kZhFiller[pick(kZhFiller.size())] : kEnFiller[pick(kEnFiller.size())];
    }

    Sentence sentence(const Topic& t, bool zh, std::size_t n = 12) {
        Sentence s;
        for (std::size_t i = 0; i < n; ++i)
            s.push_back(word(t, zh));
        return s;
    }

    TextPlan plan(const Topic& t, bool zh, bool headings) {
        TextPlan p;
        p.title = sentence(t, zh, 4);
        for (int i = 0; i < 2; ++i)
            p.abstract.push_back(sentence(t, zh));
        for (int i = 0; i < 2; ++i)
            p.claims.push_back(sentence(t, zh));
        for (auto& sec : p.sections)
            for (int i = 0; i < 3; ++i)
                sec.push_back(sentence(t, zh));
        p.headings = headings;
        return p;
    }

    // Replaces each word with probability `rate`.
    void mutate(std::vector<Sentence>& sentences, double rate, const Topic& t, bool zh) {
        for (auto& s : sentences)
            for (auto& w : s)
                if (unit() < rate)
                    w = word(t, zh);
    }

    TextPlan near_copy(TextPlan p, double rate, const Topic& t, bool zh) {
        std::vector<Sentence> title{p.title};
        mutate(title, rate, t, zh);
        p.title = title[0];
        mutate(p.abstract, rate, t, zh);
        mutate(p.claims, rate, t, zh);
        for (auto& sec : p.sections)
            mutate(sec, rate, t, zh);
        return p;
    }

    Date date_between(Date from, Date to) {
        const auto span = (std::chrono::sys_days{to.ymd()} - std::chrono::sys_days{from.ymd()}).count();
        return from.plus_days(static_cast<int>(pick(static_cast<std::size_t>(span) + 1)));
    }

private:
    std::mt19937_64 rng_;
};

std::string join_sentence(const Sentence& s, bool zh) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i && !zh)
            out += ' ';
        out += s[i];
    }
    if (!zh && !out.empty() && out[0] >= 'a' && out[0] <= 'z')
        out[0] = static_cast<char>(out[0] - 'a' + 'A');
    return out + (zh ? "。" : ".");
}

std::string join_paragraph(const std::vector<Sentence>& ss, bool zh) {
    std::string out;
    for (std::size_t i = 0; i < ss.size(); ++i) {
        if (i && !zh)
            out += ' ';
        out += join_sentence(ss[i], zh);
    }
    return out;
}

Rendered render(const TextPlan& p, bool zh) {
    Rendered r;
    r.title = join_sentence(p.title, zh);
    r.title.erase(r.title.size() - (zh ? 3 : 1));
    r.abstract_text = join_paragraph(p.abstract, zh);
    for (std::size_t i = 0; i < p.claims.size(); ++i) {
        if (i)
            r.claims += zh ? "" : " ";
        r.claims += std::to_string(i + 1) + ". ";
        if (i)
            r.claims += zh ? "根据权利要求1所述的" : "The device of claim 1, ";
        r.claims += join_sentence(p.claims[i], zh);
    }
    const auto& headings = zh ? kZhHeadings : kEnHeadings;
    for (std::size_t i = 0; i < p.sections.size(); ++i) {
        if (p.sections[i].empty())
            continue;
        if (p.headings)
            r.description += headings[i] + "\n";
        r.description += join_paragraph(p.sections[i], zh) + "\n";
    }
    return r;
}

class IdFactory {
public:
    std::string next(const std::string& jurisdiction) {
        const std::size_t n = counters_[jurisdiction]++;
        char buf[32];
        if (jurisdiction == "CN")
            std::snprintf(buf, sizeof buf, "CN1%08zuA", 10'000'000 + 137 * n);
        else if (jurisdiction == "US")
            std::snprintf(buf, sizeof buf, "US%010zuA1", 2'016'000'000 + 211 * n);
        else if (jurisdiction == "EP")
            std::snprintf(buf, sizeof buf, "EP%07zuA1", 3'000'000 + 97 * n);
        else
            std::snprintf(buf, sizeof buf, "WO%010zuA1", 2'018'000'000 + 173 * n);
        return buf;
    }
    std::string family() {
        char buf[32];
        std::snprintf(buf, sizeof buf, "FAM%06zu", ++families_);
        return buf;
    }

private:
    std::map<std::string, std::size_t> counters_;
    std::size_t families_ = 0;
};

} // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticOptions& options) {
    Generator g(options.seed);
    IdFactory ids;
    SyntheticCorpus out;
    out.corpus = Corpus(options.reference_date);
    auto& truth = out.truth;
    const Date ref = options.reference_date;
    const Date cutoff = ref.minus_years(10);

    std::size_t doc_counter = 0;
    auto add_doc = [&](const std::string& jurisdiction, const Topic& t, const TextPlan& plan, Date filed,
                       const std::string& family) {
        const bool zh = !options.monolingual && jurisdiction == "CN";
        const auto r = render(plan, zh);
        PatentDocument d;
        d.doc_id = ids.next(jurisdiction);
        d.jurisdiction = jurisdiction;
        d.language = zh ? "zh" : "en";
        d.ipc_codes = {t.ipc};
        d.filing_date = filed;
        d.family_id = family.empty() ? ids.family() : family;
        d.title = r.title;
        d.abstract_text = r.abstract_text;
        d.claims = r.claims;
        d.description = r.description;
        ++doc_counter;
        const auto id = d.doc_id;
        out.corpus.add_document(std::move(d));
        return id;
    };
    auto headings = [&] { return doc_counter % 7 != 3; };
    auto cite = [&](const std::string& from, const std::string& to, CitationCategory cat) {
        out.corpus.add_citation({from, to, cat, CitationSource::Examiner});
        if (cat == CitationCategory::X)
            truth.x_edges.emplace_back(from, to);
    };
    auto en_jurisdiction = [&] {
        static const std::array<std::string, 3> j{"US", "EP", "WO"};
        return j[g.pick(j.size())];
    };
    auto prior_date = [&](Date after) { return after.plus_days(-400 - static_cast<int>(g.pick(2500))); };
    const Date recent_from{2015, 6, 1};
    const Date recent_to{2024, 6, 30};

    // Simple clusters.
    // Stale mains first, then the retained ones; together with the family
    // clusters the retained mains split 25 CN / 10 US / 10 EP / 5 WO.
    std::vector<std::string> juris{"CN", "US", "EP", "WO", "CN"};
    std::vector<std::string> retained(25, "CN");
    retained.insert(retained.end(), 5, "US");
    g.shuffle(retained);
    juris.insert(juris.end(), retained.begin(), retained.end());
    std::size_t cross_language_left = options.monolingual ? 0 : kCrossLanguage;
    std::vector<std::string> simple_mains;
    for (std::size_t c = 0; c < kSimpleClusters; ++c) {
        const auto topic = g.topic();
        const auto& j = juris[c];
        const bool zh = !options.monolingual && j == "CN";
        Date filed;
        if (c == 0)
            filed = cutoff.plus_days(-1);
        else if (c < kStale)
            filed = g.date_between(Date{2008, 1, 1}, cutoff.plus_days(-2));
        else if (c == kStale)
            filed = cutoff;
        else
            filed = g.date_between(recent_from, recent_to);

        const auto main_plan = g.plan(topic, zh, headings());
        const auto main_id = add_doc(j, topic, main_plan, filed, "");
        simple_mains.push_back(main_id);
        truth.main_ids.insert(main_id);
        ++truth.main_jurisdictions[j];
        if (c < kStale)
            truth.stale_mains.insert(main_id);
        else
            ++truth.retained_jurisdictions[j];

        const auto prior = add_doc(zh ? "CN" : en_jurisdiction(), topic, g.near_copy(main_plan, 0.05, topic, zh),
                                   prior_date(filed), "");
        truth.near_copies.insert(prior);
        cite(main_id, prior, CitationCategory::X);

        const bool cross = zh && c > kStale && cross_language_left > 0;
        const auto related_j = cross ? en_jurisdiction() : (zh ? "CN" : en_jurisdiction());
        const auto related = add_doc(related_j, topic, g.plan(topic, !cross && zh, headings()), prior_date(filed), "");
        if (cross) {
            --cross_language_left;
            cite(main_id, related, CitationCategory::X);
        } else {
            cite(main_id, related, CitationCategory::Y);
        }

        const auto other_topic = g.topic();
        const auto background = add_doc(en_jurisdiction(), other_topic, g.plan(other_topic, false, headings()),
                                        prior_date(filed), "");
        cite(main_id, background, CitationCategory::A);
    }

    // Family clusters.
    static const std::array<double, kFamilyClusters> planted{0.50, 0.85, 0.89, 0.8999999, 0.90,
                                                             0.9000001, 0.91, 0.95, 0.99, 1.0};
    for (std::size_t c = 0; c < kFamilyClusters; ++c) {
        const auto topic = g.topic();
        const std::string main_j = c % 2 ? "EP" : "US";
        const std::string member_j = c % 2 ? "WO" : "EP";
        const auto family = ids.family();
        const Date filed = g.date_between(recent_from, recent_to);
        const auto main_plan = g.plan(topic, false, headings());
        const auto main_id = add_doc(main_j, topic, main_plan, filed, family);

        TextPlan member_plan = main_plan;
        const bool aligned = planted[c] >= 0.90;
        if (aligned) {
            for (auto& sec : member_plan.sections)
                g.mutate(sec, 0.01, topic, false);
        } else {
            member_plan.sections[1].resize(1);
            member_plan.sections[2].clear();
            member_plan.sections[3].clear();
        }
        const auto member_id = add_doc(member_j, topic, member_plan, filed.plus_days(5 + static_cast<int>(g.pick(300))),
                                       family);
        truth.families[family] = main_id < member_id ? std::vector{main_id, member_id} : std::vector{member_id, main_id};
        truth.family_pairs.push_back({main_id, member_id, planted[c]});
        truth.main_ids.insert(main_id);
        truth.main_ids.insert(member_id);
        for (const auto& j : {main_j, member_j}) {
            ++truth.main_jurisdictions[j];
            ++truth.retained_jurisdictions[j];
        }

        const auto prior_main = add_doc(en_jurisdiction(), topic, g.near_copy(main_plan, 0.05, topic, false),
                                        prior_date(filed), "");
        const auto prior_member = add_doc(en_jurisdiction(), topic, g.near_copy(main_plan, 0.05, topic, false),
                                          prior_date(filed), "");
        truth.near_copies.insert(prior_main);
        truth.near_copies.insert(prior_member);
        cite(main_id, prior_main, CitationCategory::X);
        cite(member_id, prior_member, CitationCategory::X);
    }

    // Distractors.
    static const std::array<std::string, 10> mix{"CN", "CN", "CN", "CN", "CN", "US", "US", "EP", "EP", "WO"};
    for (std::size_t i = 0; i < kDistractors; ++i) {
        const auto topic = g.topic();
        const auto& j = mix[g.pick(mix.size())];
        add_doc(j, topic, g.plan(topic, !options.monolingual && j == "CN", headings()),
                g.date_between(Date{2005, 1, 1}, recent_to), "");
    }

    // Citations to documents outside the corpus.
    for (std::size_t i = 0; i < kDangling; ++i) {
        char missing[32];
        std::snprintf(missing, sizeof missing, "CN1999%05zuA", 100 + i);
        CitationRecord rec{simple_mains[g.pick(simple_mains.size())], missing, CitationCategory::X,
                           CitationSource::Examiner};
        out.corpus.add_citation(rec);
        truth.dangling.push_back(rec);
    }

    if (options.plant_defects) {
        const std::array<std::string, 5> kinds{"bad_language", "bad_ipc", "future_filing_date", "empty_claims",
                                               "empty_description"};
        for (const auto& kind : kinds) {
            const auto topic = g.topic();
            auto r = render(g.plan(topic, false, true), false);
            PatentDocument d;
            d.doc_id = ids.next("US");
            d.jurisdiction = "US";
            d.language = kind == "bad_language" ? "xx" : "en";
            d.ipc_codes = {kind == "bad_ipc" ? std::string("Z99X 1/00") : topic.ipc};
            d.filing_date = kind == "future_filing_date" ? ref.plus_days(100) : Date{2020, 3, 1};
            d.family_id = ids.family();
            d.title = r.title;
            d.abstract_text = r.abstract_text;
            d.claims = kind == "empty_claims" ? "" : r.claims;
            d.description = kind == "empty_description" ? "" : r.description;
            truth.defects.emplace_back(d.doc_id, kind);
            out.corpus.add_document(std::move(d));
        }
    }
    return out;
}

} // namespace nsbench
