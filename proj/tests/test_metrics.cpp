#include "nsbench/error.hpp"
#include "nsbench/metrics.hpp"
#include "nsbench/synthetic.hpp"

#include "oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace nsbench;

namespace {

Matcher family_matcher(const std::map<std::string, std::string>& family_of) {
    return Matcher(MatchRule::Family, {family_of.begin(), family_of.end()});
}

// Four queries whose first relevant ranks are 1, 3, 7 and none.
struct FourQueries {
    EvaluationDataset ds;
    RunRecord run;
    FourQueries() {
        ds = test::make_dataset({test::make_case("Q1", {"R1"}), test::make_case("Q2", {"R2"}),
                                 test::make_case("Q3", {"R3"}), test::make_case("Q4", {"R4"})});
        run = test::make_run(ds);
        run.results["Q1"] = test::make_list("Q1", {"R1", "X1"});
        run.results["Q2"] = test::make_list("Q2", {"X1", "X2", "R2"});
        run.results["Q3"] = test::make_list("Q3", {"X1", "X2", "X3", "X4", "X5", "X6", "R3"});
        run.results["Q4"] = test::make_list("Q4", {"X1", "X2"});
    }
};

} // namespace

TEST(Detection, RanksOneThreeSevenNone) {
    const FourQueries f;
    EXPECT_DOUBLE_EQ(topk_detection_rate(f.run, f.ds, 1), 0.25);
    EXPECT_DOUBLE_EQ(topk_detection_rate(f.run, f.ds, 3), 0.5);
    EXPECT_DOUBLE_EQ(topk_detection_rate(f.run, f.ds, 5), 0.5);
    EXPECT_DOUBLE_EQ(topk_detection_rate(f.run, f.ds, 10), 0.75);
    const auto curve = detection_curve(f.run, f.ds, {1, 3, 5, 10});
    ASSERT_EQ(curve.points.size(), 4u);
    EXPECT_EQ(curve.points[3].hits, 3u);
    EXPECT_EQ(curve.n_queries, 4u);
}

TEST(Detection, InvalidInputs) {
    const FourQueries f;
    EXPECT_THROW(topk_detection_rate(f.run, f.ds, 0), std::invalid_argument);
    EXPECT_THROW(detection_curve(f.run, f.ds, {3, 1}), std::invalid_argument);
    EXPECT_THROW(detection_curve(f.run, f.ds, {1, 1}), std::invalid_argument);
    const EvaluationDataset empty;
    EXPECT_THROW(topk_detection_rate(RunRecord{}, empty, 1), UndefinedMetricError);
    EXPECT_THROW(recall(RunRecord{}, empty), UndefinedMetricError);
}

TEST(Detection, CoverageMismatchIsIntegrityError) {
    FourQueries f;
    f.run.results.erase("Q4");
    EXPECT_THROW(topk_detection_rate(f.run, f.ds, 1), IntegrityError);
    f.run.results["Q9"] = test::make_list("Q9", {});
    EXPECT_THROW(topk_detection_rate(f.run, f.ds, 1), IntegrityError);
}

TEST(Detection, FailedQueriesCountAsMisses) {
    FourQueries f;
    f.run.results["Q1"].hits.clear();
    f.run.results["Q1"].status = QueryStatus::Timeout;
    EXPECT_DOUBLE_EQ(topk_detection_rate(f.run, f.ds, 1), 0.0);
    EXPECT_DOUBLE_EQ(topk_detection_rate(f.run, f.ds, 10), 0.5);
}

TEST(Recall, OneOfThreeRetrieved) {
    const auto ds = test::make_dataset({test::make_case("Q1", {"R1", "R2", "R3"})});
    auto run = test::make_run(ds);
    run.results["Q1"] = test::make_list("Q1", {"X1", "R2", "X2"});
    EXPECT_DOUBLE_EQ(recall(run, ds), 1.0 / 3.0);
}

TEST(Recall, MicroVersusMacro) {
    const auto ds = test::make_dataset({test::make_case("Q1", {"R1"}), test::make_case("Q2", {"R2", "R3", "R4"})});
    auto run = test::make_run(ds);
    run.results["Q1"] = test::make_list("Q1", {"R1"});
    run.results["Q2"] = test::make_list("Q2", {"X"});
    EXPECT_DOUBLE_EQ(recall(run, ds, {}, RecallAveraging::Micro), 0.25);
    EXPECT_DOUBLE_EQ(recall(run, ds, {}, RecallAveraging::Macro), 0.5);
}

TEST(FamilyRule, MemberOfRelevantDocAtRankTwo) {
    Corpus c(Date(2025, 1, 1));
    for (const char* id : {"CN1", "US1", "EP1", "X1"}) {
        auto d = test::make_doc(id);
        d.family_id = std::string(id) == "X1" ? "FX" : "FAM";
        c.add_document(d);
    }
    const auto ds = test::make_dataset({test::make_case("Q1", {"CN1"})});
    auto run = test::make_run(ds);
    run.results["Q1"] = test::make_list("Q1", {"X1", "US1", "EP1"});
    const auto m = Matcher::family(c);
    EXPECT_EQ(first_relevant_rank(run.results["Q1"], {"CN1"}, m), 2);
    EXPECT_EQ(first_relevant_rank(run.results["Q1"], {"CN1"}), std::nullopt);
    EXPECT_DOUBLE_EQ(topk_detection_rate(run, ds, 1, m), 0.0);
    EXPECT_DOUBLE_EQ(topk_detection_rate(run, ds, 2, m), 1.0);
    EXPECT_DOUBLE_EQ(recall(run, ds, m), 1.0);
    // Unknown documents only match themselves.
    EXPECT_EQ(m.key("NOPE"), "doc:NOPE");
}

TEST(Oracle, RandomPairsMatchBruteForce) {
    auto rng = make_stream(2024, 1);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = test::random_case(rng);
        const auto fam = family_matcher(c.family_of);
        for (int k : kDefaultKGrid) {
            ASSERT_EQ(topk_detection_rate(c.run, c.dataset, k), test::oracle_detection_rate(c.run, c.dataset, k));
            ASSERT_EQ(topk_detection_rate(c.run, c.dataset, k, fam),
                      test::oracle_detection_rate(c.run, c.dataset, k, c.family_of));
        }
        const auto ex = test::oracle_recall(c.run, c.dataset);
        const auto fr = test::oracle_recall(c.run, c.dataset, c.family_of);
        ASSERT_EQ(recall(c.run, c.dataset), ex.micro());
        ASSERT_EQ(recall(c.run, c.dataset, {}, RecallAveraging::Macro), ex.macro());
        ASSERT_EQ(recall(c.run, c.dataset, fam), fr.micro());
    }
}

TEST(Oracle, SyntheticRunMatchesSetIntersection) {
    const auto synth = generate_synthetic_corpus();
    const auto ds = build_dataset(synth.corpus, TrigramJaccardScorer{}, {.seed = 2}).dataset;
    auto run = test::make_run(ds, 10);
    // Every third document of the corpus, offset per query.
    std::vector<std::string> ids;
    for (const auto& [id, d] : synth.corpus.documents())
        ids.push_back(id);
    for (std::size_t i = 0; i < ds.queries.size(); ++i) {
        std::vector<std::string> hits;
        for (std::size_t j = i; hits.size() < 10; j += 3)
            hits.push_back(ids[j % ids.size()]);
        const auto& q = ds.queries[i];
        if (i % 4 == 0)
            hits[i % 10] = q.relevant.begin()->first;
        run.results[q.query_doc_id] = test::make_list(q.query_doc_id, hits);
    }
    EXPECT_EQ(recall(run, ds), test::oracle_recall(run, ds).micro());
    EXPECT_EQ(topk_detection_rate(run, ds, 10), test::oracle_detection_rate(run, ds, 10));
    EXPECT_GT(test::oracle_detected(run, ds, 10), 0u);
}

TEST(Property, CurveNonDecreasingInK) {
    auto rng = make_stream(77, 0);
    std::vector<int> ks;
    for (int k = 1; k <= 200; ++k)
        ks.push_back(k);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = test::random_case(rng);
        const auto curve = detection_curve(c.run, c.dataset, ks);
        for (std::size_t i = 1; i < curve.points.size(); ++i)
            ASSERT_LE(curve.points[i - 1].rate, curve.points[i].rate);
    }
}

TEST(Property, RatesWithinUnitInterval) {
    auto rng = make_stream(78, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = test::random_case(rng);
        for (int k : kDefaultKGrid) {
            const double r = topk_detection_rate(c.run, c.dataset, k);
            ASSERT_GE(r, 0.0);
            ASSERT_LE(r, 1.0);
        }
        const double rc = recall(c.run, c.dataset);
        ASSERT_GE(rc, 0.0);
        ASSERT_LE(rc, 1.0);
    }
}

TEST(PublishedFixture, ReproducesPublishedRows) {
    const auto f = test::published_fixture();
    const std::vector<int> ks = kDefaultKGrid;
    const std::vector<double> novelty{0.17, 0.26, 0.31, 0.39, 0.46, 0.53, 0.59, 0.67};
    const std::vector<double> semantic{0.11, 0.16, 0.20, 0.24, 0.29, 0.33, 0.38, 0.44};
    const auto cn = detection_curve(f.novelty, f.dataset, ks);
    const auto cs = detection_curve(f.semantic, f.dataset, ks);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        EXPECT_EQ(cn.points[i].hits, static_cast<std::size_t>(std::lround(novelty[i] * 100)));
        EXPECT_EQ(cs.points[i].hits, static_cast<std::size_t>(std::lround(semantic[i] * 100)));
    }
    EXPECT_DOUBLE_EQ(recall(f.novelty, f.dataset), 0.43);
    EXPECT_DOUBLE_EQ(recall(f.semantic, f.dataset), 0.32);
}
