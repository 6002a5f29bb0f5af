#include "nsbench/dataset.hpp"
#include "nsbench/error.hpp"
#include "nsbench/rng.hpp"
#include "nsbench/synthetic.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace nsbench;

namespace {

TableAlignmentScorer planted_scorer(const SyntheticTruth& truth) {
    TableAlignmentScorer s("planted");
    for (const auto& p : truth.family_pairs)
        s.set(p.main_id, p.member_id, p.planted_score);
    return s;
}

void cite(Corpus& c, const std::string& from, const std::string& to,
          CitationCategory cat = CitationCategory::X, CitationSource src = CitationSource::Examiner) {
    c.add_citation({from, to, cat, src});
}

} // namespace

// ---------------------------------------------------------------------------
// X-citation extraction and profile
// ---------------------------------------------------------------------------

TEST(ExtractX, TotalsMatchGeneratorEdges) {
    const auto synth = generate_synthetic_corpus();
    const auto xmap = extract_x_citations(synth.corpus);
    std::set<std::pair<std::string, std::string>> got;
    for (const auto& [citing, cited] : xmap)
        for (const auto& id : cited)
            got.emplace(citing, id);
    const std::set<std::pair<std::string, std::string>> expected(synth.truth.x_edges.begin(),
                                                                 synth.truth.x_edges.end());
    EXPECT_EQ(got.size(), 60u);
    EXPECT_EQ(got, expected);
    EXPECT_EQ(xmap.size(), synth.truth.main_ids.size());
}

TEST(ExtractX, SkipsNonXNonExaminerAndDangling) {
    Corpus c(Date(2025, 1, 1));
    for (const char* id : {"A", "B", "C", "D"})
        c.add_document(test::make_doc(id));
    cite(c, "A", "B");
    cite(c, "A", "C", CitationCategory::Y);
    cite(c, "A", "D", CitationCategory::X, CitationSource::FamilyDerived);
    cite(c, "B", "MISSING");
    const auto xmap = extract_x_citations(c);
    ASSERT_EQ(xmap.size(), 1u);
    EXPECT_EQ(xmap.at("A"), (std::set<std::string>{"B"}));
}

TEST(Profile, CitationTypeProportions) {
    Corpus c(Date(2025, 1, 1));
    for (const char* id : {"A", "B", "C", "D", "E"})
        c.add_document(test::make_doc(id));
    cite(c, "A", "B");
    cite(c, "A", "C");
    cite(c, "D", "E");
    cite(c, "A", "E", CitationCategory::Y);
    const auto p = profile_distributions(c);
    EXPECT_EQ(p.citation_type_proportions, (std::map<std::string, double>{{"X", 0.75}, {"Y", 0.25}}));
    EXPECT_DOUBLE_EQ(p.x_patent_fraction, 2.0 / 5.0);
}

TEST(Profile, JurisdictionMixMatchesGeneratorPlan) {
    const auto synth = generate_synthetic_corpus();
    const auto p = profile_distributions(synth.corpus);
    EXPECT_EQ(p.jurisdiction_counts, synth.truth.main_jurisdictions);
    std::size_t total = 0;
    for (const auto& [j, n] : p.language_counts_primary)
        total += n;
    EXPECT_EQ(total, synth.truth.main_ids.size());
}

// ---------------------------------------------------------------------------
// Alignment scoring
// ---------------------------------------------------------------------------

TEST(Alignment, IdenticalAndDisjointTexts) {
    auto a = test::make_doc("A"), b = test::make_doc("B");
    const TrigramJaccardScorer s;
    EXPECT_DOUBLE_EQ(alignment_score(a, b, s).value, 1.0);
    a.claims = "abc";
    a.description = "";
    b.claims = "xyz";
    b.description = "";
    EXPECT_DOUBLE_EQ(alignment_score(a, b, s).value, 0.0);
}

// Hand computation: "abcd" -> {abc, bcd}, "abce" -> {abc, bce}; 1 shared of 3.
// "aaaa" -> {aaa x2}, "aaa" -> {aaa x1}; min 1 over max 2.
TEST(Alignment, MultisetJaccardByHand) {
    auto a = test::make_doc("A"), b = test::make_doc("B");
    a.description = b.description = "";
    a.claims = "abcd";
    b.claims = "ABCE";
    const TrigramJaccardScorer s;
    EXPECT_DOUBLE_EQ(s.score(a, b), 1.0 / 3.0);
    a.claims = "aaaa";
    b.claims = "aaa";
    EXPECT_DOUBLE_EQ(s.score(a, b), 0.5);
    // Whitespace runs collapse before grams are taken.
    a.claims = "ab  \n cd";
    b.claims = "ab cd";
    EXPECT_DOUBLE_EQ(s.score(a, b), 1.0);
}

TEST(Alignment, BothEmptyIsUndefined) {
    auto a = test::make_doc("A"), b = test::make_doc("B");
    a.claims = a.description = b.claims = b.description = " ";
    EXPECT_THROW(alignment_score(a, b, TrigramJaccardScorer{}), UndefinedScoreError);
}

TEST(Alignment, OutOfRangeBackendIsRejected) {
    TableAlignmentScorer t("t");
    t.set("A", "B", 1.5);
    EXPECT_THROW(alignment_score(test::make_doc("A"), test::make_doc("B"), t), UndefinedScoreError);
    EXPECT_THROW(alignment_score(test::make_doc("A"), test::make_doc("C"), t), UndefinedScoreError);
}

TEST(Alignment, TableLoadsFromJsonl) {
    test::TempDir dir("align");
    test::write_file(dir / "s.jsonl", R"({"a":"X1","b":"X2","score":0.93})" "\n");
    const auto t = TableAlignmentScorer::load(dir / "s.jsonl");
    EXPECT_EQ(t.id(), "table:s.jsonl");
    EXPECT_DOUBLE_EQ(t.score(test::make_doc("X2"), test::make_doc("X1")), 0.93);
}

// ---------------------------------------------------------------------------
// Family augmentation
// ---------------------------------------------------------------------------

class Augment : public ::testing::Test {
protected:
    void SetUp() override {
        corpus = Corpus(Date(2025, 1, 1));
        for (const char* id : {"M", "FA", "FB", "FC"}) {
            auto d = test::make_doc(id);
            d.family_id = "FAM";
            corpus.add_document(d);
        }
        for (const char* id : {"P1", "P2", "P3", "P4", "P5"})
            corpus.add_document(test::make_doc(id));
        cite(corpus, "M", "P1");
        cite(corpus, "FA", "P2");
        cite(corpus, "FA", "P3");
        cite(corpus, "FB", "P3");
        cite(corpus, "FB", "P4");
        cite(corpus, "FB", "P1");
        cite(corpus, "FB", "M"); // self-reference within the family
        cite(corpus, "FC", "P5");
        scorer.set("M", "FA", 0.95);
        scorer.set("M", "FB", 0.90);
        scorer.set("M", "FC", 0.89);
        scorer.set("FA", "FB", 0.5);
        scorer.set("FA", "FC", 0.5);
        scorer.set("FB", "FC", 0.5);
    }
    Corpus corpus;
    TableAlignmentScorer scorer{"fixture"};
};

TEST_F(Augment, UnionWithAlignedMembersCitations) {
    const auto cases = augment_with_family_citations(corpus, extract_x_citations(corpus), scorer);
    const auto& m = cases.at("M");
    const std::map<std::string, CitationSource, std::less<>> expected{
        {"P1", CitationSource::Examiner},
        {"P2", CitationSource::FamilyDerived},
        {"P3", CitationSource::FamilyDerived},
        {"P4", CitationSource::FamilyDerived},
    };
    EXPECT_EQ(m.relevant, expected);
}

TEST_F(Augment, ThresholdBoundaries) {
    const auto base = extract_x_citations(corpus);
    // 0.89 is below the default threshold: P5 never joins.
    EXPECT_FALSE(augment_with_family_citations(corpus, base, scorer).at("M").relevant.contains("P5"));
    EXPECT_TRUE(augment_with_family_citations(corpus, base, scorer, {.threshold = 0.89}).at("M").relevant.contains("P5"));
    EXPECT_FALSE(augment_with_family_citations(corpus, base, scorer, {.threshold = 0.91}).at("M").relevant.contains("P4"));
    EXPECT_THROW(augment_with_family_citations(corpus, base, scorer, {.threshold = 1.01}), std::invalid_argument);
    EXPECT_THROW(augment_with_family_citations(corpus, base, scorer, {.threshold = -0.1}), std::invalid_argument);
}

TEST_F(Augment, ScorerFailureSkipsMemberWithWarning) {
    TableAlignmentScorer partial("partial");
    partial.set("M", "FA", 0.95);
    std::vector<std::string> warnings;
    const auto cases = augment_with_family_citations(corpus, extract_x_citations(corpus), partial, {}, &warnings);
    EXPECT_TRUE(cases.at("M").relevant.contains("P2"));
    EXPECT_FALSE(cases.at("M").relevant.contains("P4"));
    EXPECT_FALSE(warnings.empty());
}

TEST(AugmentProperty, RelevantSetsShrinkAsThresholdRises) {
    const auto synth = generate_synthetic_corpus();
    const auto scorer = planted_scorer(synth.truth);
    const auto base = extract_x_citations(synth.corpus);
    const std::vector<double> grid{0.0, 0.5, 0.85, 0.89, 0.8999999, 0.9, 0.9000001, 0.95, 1.0};
    std::optional<CaseMap> prev;
    for (double t : grid) {
        const auto cur = augment_with_family_citations(synth.corpus, base, scorer, {.threshold = t});
        for (const auto& [id, qc] : cur) {
            const auto examiner = base.at(id);
            for (const auto& e : examiner)
                EXPECT_EQ(qc.relevant.at(e), CitationSource::Examiner);
            if (prev)
                for (const auto& [rid, src] : qc.relevant)
                    EXPECT_TRUE(prev->at(id).relevant.contains(rid)) << "t=" << t << " " << id << " " << rid;
        }
        prev = cur;
    }
}

// ---------------------------------------------------------------------------
// Quality filters
// ---------------------------------------------------------------------------

TEST(Filters, RecencyBoundaryIsInclusive) {
    Corpus c(Date(2025, 1, 1));
    auto ten = test::make_doc("TEN");
    ten.filing_date = Date(2015, 1, 1);
    auto eleven = test::make_doc("ELEVEN");
    eleven.filing_date = Date(2014, 1, 1);
    auto day_before = test::make_doc("DAYBEFORE");
    day_before.filing_date = Date(2014, 12, 31);
    for (auto* d : {&ten, &eleven, &day_before})
        c.add_document(*d);
    CaseMap cases;
    for (const char* id : {"TEN", "ELEVEN", "DAYBEFORE"})
        cases.emplace(id, test::make_case(id, {"P"}));
    const auto r = apply_quality_filters(cases, c);
    EXPECT_EQ(r.cases.size(), 1u);
    EXPECT_TRUE(r.cases.contains("TEN"));
    EXPECT_EQ(r.excluded.size(), 2u);
}

TEST(Filters, TwentyCasesSixViolations) {
    Corpus c(Date(2025, 1, 1));
    CaseMap cases;
    for (int i = 0; i < 20; ++i) {
        const std::string id = "Q" + std::to_string(100 + i);
        auto d = test::make_doc(id);
        d.filing_date = Date(2018, 6, 1);
        cases.emplace(id, test::make_case(id, {"P1"}));
        switch (i) {
        case 0: d.filing_date = Date(2014, 12, 31); break;
        case 1: d.filing_date = Date(2009, 3, 3); break;
        case 2: d.filing_date = Date(2025, 1, 2); break;
        case 3: d.description = "  "; break;
        case 4: cases.at(id).relevant.clear(); break;
        case 5: continue; // not in corpus
        case 6: d.filing_date = Date(2015, 1, 1); break;
        case 7: d.filing_date = Date(2025, 1, 1); break;
        default: break;
        }
        c.add_document(d);
    }
    const auto r = apply_quality_filters(cases, c);
    EXPECT_EQ(r.cases.size(), 14u);
    std::set<std::string> excluded;
    for (const auto& [id, why] : r.excluded)
        excluded.insert(id);
    EXPECT_EQ(excluded, (std::set<std::string>{"Q100", "Q101", "Q102", "Q103", "Q104", "Q105"}));
}

// ---------------------------------------------------------------------------
// Stratified allocation
// ---------------------------------------------------------------------------

TEST(Allocation, LargestRemainderByHand) {
    // 37 seats over 0.5/0.2/0.2/0.1: quotas 18.5, 7.4, 7.4, 3.7; floors 35;
    // the two leftover seats go to remainders .7 then .5.
    EXPECT_EQ(largest_remainder({0.5, 0.2, 0.2, 0.1}, 37), (std::vector<std::size_t>{19, 7, 7, 4}));
    EXPECT_EQ(largest_remainder({1, 1, 1}, 2), (std::vector<std::size_t>{1, 1, 0}));
    EXPECT_EQ(largest_remainder({0.29, 0.71}, 100), (std::vector<std::size_t>{29, 71}));
    EXPECT_EQ(largest_remainder({1, 0}, 3), (std::vector<std::size_t>{3, 0}));
}

TEST(Allocation, PropertySumAndQuotaBounds) {
    auto rng = make_stream(5, 0);
    for (int trial = 0; trial < 500; ++trial) {
        const auto n = 1 + uniform_index(rng, 8);
        std::vector<double> w(n);
        double sum = 0;
        for (auto& x : w)
            sum += (x = 0.01 + uniform_unit(rng));
        const auto total = uniform_index(rng, 200);
        const auto seats = largest_remainder(w, total);
        std::size_t got = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double quota = w[i] / sum * static_cast<double>(total);
            EXPECT_GE(static_cast<double>(seats[i]), std::floor(quota) - 1e-9);
            EXPECT_LE(static_cast<double>(seats[i]), std::ceil(quota) + 1e-9);
            got += seats[i];
        }
        EXPECT_EQ(got, total);
    }
}

TEST(Allocation, JurisdictionRatiosOverPool) {
    CaseMap cases;
    const std::map<std::string, int> pool{{"CN", 30}, {"US", 12}, {"EP", 12}, {"WO", 6}};
    for (const auto& [j, n] : pool)
        for (int i = 0; i < n; ++i) {
            const auto id = j + std::to_string(1000 + i);
            cases.emplace(id, test::make_case(id, {"P"}, "en", "G", j));
        }
    const StratumTargets targets{Dimension::Jurisdiction, {{"CN", 0.5}, {"US", 0.2}, {"EP", 0.2}, {"WO", 0.1}}};
    const auto ds = assemble_dataset(cases, {}, targets, 37, 11);
    std::map<std::string, std::size_t> realized;
    for (const auto& q : ds.queries)
        ++realized[q.strata.jurisdiction];
    const std::map<std::string, std::size_t> by_hand{{"CN", 19}, {"EP", 7}, {"US", 7}, {"WO", 4}};
    EXPECT_EQ(realized, by_hand);
    EXPECT_EQ(ds.manifest.allocation, by_hand);
}

TEST(Allocation, EvenLanguageSplitIsDeterministic) {
    CaseMap cases;
    for (int i = 0; i < 100; ++i) {
        const auto id = "D" + std::to_string(1000 + i);
        cases.emplace(id, test::make_case(id, {"P"}, i % 2 ? "zh" : "en"));
    }
    const StratumTargets t{Dimension::Language, {{"zh", 0.5}, {"en", 0.5}}};
    const auto a = assemble_dataset(cases, {}, t, 10, 99);
    const auto b = assemble_dataset(cases, {}, t, 10, 99);
    const auto c = assemble_dataset(cases, {}, t, 10, 100);
    EXPECT_EQ(a.manifest.allocation, (std::map<std::string, std::size_t>{{"en", 5}, {"zh", 5}}));
    EXPECT_EQ(a, b);
    EXPECT_NE(a.queries, c.queries);
    EXPECT_TRUE(std::is_sorted(a.queries.begin(), a.queries.end(),
                               [](const auto& x, const auto& y) { return x.query_doc_id < y.query_doc_id; }));
}

TEST(Allocation, ShortfallMovesToOpenStrata) {
    const auto alloc = allocate_strata({{"CN", 0.9}, {"US", 0.1}}, {{"CN", 2}, {"US", 5}}, 4);
    EXPECT_EQ(alloc, (std::map<std::string, std::size_t>{{"CN", 2}, {"US", 2}}));
}

TEST(Allocation, InfeasibleTargetsNameTheStratum) {
    try {
        allocate_strata({{"CN", 0.9}, {"US", 0.1}}, {{"CN", 2}, {"US", 0}}, 3);
        FAIL() << "expected InfeasibleTargetsError";
    } catch (const InfeasibleTargetsError& e) {
        EXPECT_EQ(e.stratum(), "CN");
        EXPECT_NE(std::string(e.what()).find("CN"), std::string::npos);
    }
}

TEST(Allocation, RejectsBadTargets) {
    CaseMap cases;
    cases.emplace("A", test::make_case("A", {"P"}));
    EXPECT_THROW(assemble_dataset(cases, {}, {Dimension::Language, {{"en", 0.6}}}, 1, 0), std::invalid_argument);
    EXPECT_THROW(assemble_dataset(cases, {}, {Dimension::Language, {{"en", 1.0}}}, 2, 0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Whole builder on the planted corpus
// ---------------------------------------------------------------------------

TEST(Build, RetainsExactlyPlantedCompliantCases) {
    const auto synth = generate_synthetic_corpus();
    const auto out = build_dataset(synth.corpus, planted_scorer(synth.truth), {.seed = 3});

    std::set<std::string> queries;
    for (const auto& q : out.dataset.queries)
        queries.insert(q.query_doc_id);
    std::set<std::string> expected_queries;
    for (const auto& id : synth.truth.main_ids)
        if (!synth.truth.stale_mains.contains(id))
            expected_queries.insert(id);
    EXPECT_EQ(queries, expected_queries);

    std::map<std::string, std::string> x_of;
    for (const auto& [from, to] : synth.truth.x_edges)
        x_of[from] = to;
    std::set<std::pair<std::string, std::string>> derived, expected_derived;
    for (const auto& q : out.dataset.queries)
        for (const auto& [id, src] : q.relevant)
            if (src == CitationSource::FamilyDerived)
                derived.emplace(q.query_doc_id, id);
    for (const auto& p : synth.truth.family_pairs)
        if (p.planted_score >= 0.90) {
            expected_derived.emplace(p.main_id, x_of.at(p.member_id));
            expected_derived.emplace(p.member_id, x_of.at(p.main_id));
        }
    EXPECT_EQ(derived, expected_derived);
    EXPECT_EQ(out.dataset.manifest.allocation, synth.truth.retained_jurisdictions);
}

TEST(Build, SameSeedSameBytes) {
    const auto synth = generate_synthetic_corpus();
    const TrigramJaccardScorer scorer;
    const BuildConfig cfg{.seed = 17, .parallelism = 4, .sample_size = 30};
    const auto a = build_dataset(synth.corpus, scorer, cfg);
    const auto b = build_dataset(synth.corpus, scorer, cfg);
    EXPECT_EQ(serialize_dataset(a.dataset), serialize_dataset(b.dataset));
    EXPECT_EQ(a.dataset.queries.size(), 30u);
}

TEST(DatasetIo, RoundTrip) {
    const auto synth = generate_synthetic_corpus();
    const auto ds = build_dataset(synth.corpus, TrigramJaccardScorer{}, {.seed = 1}).dataset;
    const auto text = serialize_dataset(ds);
    EXPECT_EQ(parse_dataset(text), ds);
    test::TempDir dir("ds");
    write_dataset(dir / "d.jsonl", ds);
    EXPECT_EQ(load_dataset(dir / "d.jsonl"), ds);
    EXPECT_EQ(dataset_hash(load_dataset(dir / "d.jsonl")), dataset_hash(ds));
}

TEST(DatasetIo, RejectsMalformedFiles) {
    EXPECT_THROW(parse_dataset(""), ParseError);
    EXPECT_THROW(parse_dataset("{\"kind\":\"query\"}\n"), ParseError);
}
