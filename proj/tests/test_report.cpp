#include "nsbench/error.hpp"
#include "nsbench/reference.hpp"
#include "nsbench/report.hpp"
#include "nsbench/synthetic.hpp"

#include "oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace nsbench;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"')
                    cell += '"', ++i;
                else if (c == '"')
                    quoted = false;
                else
                    cell += c;
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                cells.push_back(cell);
                cell.clear();
            } else {
                cell += c;
            }
        }
        cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const std::string& file(const std::vector<std::pair<std::string, std::string>>& files, const std::string& name) {
    for (const auto& [n, c] : files)
        if (n == name)
            return c;
    throw std::runtime_error("no file " + name);
}

struct SyntheticRun {
    SyntheticCorpus synth;
    EvaluationDataset dataset;
    RunRecord run;
};

const SyntheticRun& synthetic_run() {
    static const SyntheticRun r = [] {
        SyntheticRun s{generate_synthetic_corpus(), {}, {}};
        s.dataset = build_dataset(s.synth.corpus, TrigramJaccardScorer{}, {.seed = 9}).dataset;
        auto index = std::make_shared<ReferenceIndex>(build_reference_index(s.synth.corpus));
        s.run = run_evaluation(s.dataset, s.synth.corpus, std::make_shared<ReferenceAdapter>(index), RunControls{});
        return s;
    }();
    return r;
}

} // namespace

TEST(Breakdown, SingleLanguageRowEqualsTotals) {
    const auto ds = test::make_dataset({test::make_case("Q1", {"R1"}, "en", "G"), test::make_case("Q2", {"R2"}, "en", "H")});
    auto run = test::make_run(ds);
    run.results["Q1"] = test::make_list("Q1", {"R1"});
    run.results["Q2"] = test::make_list("Q2", {"X", "X2", "R2"});
    const auto t = breakdown_by(run, ds, Dimension::Language);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0].stratum, "en");
    EXPECT_EQ(t.rows[0].n_queries, t.totals.n_queries);
    for (std::size_t i = 0; i < t.totals.curve.points.size(); ++i)
        EXPECT_EQ(t.rows[0].curve.points[i].hits, t.totals.curve.points[i].hits);
    EXPECT_EQ(t.rows[0].recall.value, t.totals.recall.value);
}

TEST(Breakdown, RowsOrderedBySizeThenLabel) {
    const auto ds = test::make_dataset({test::make_case("Q1", {"R"}, "zh"), test::make_case("Q2", {"R"}, "en"),
                                        test::make_case("Q3", {"R"}, "ja"), test::make_case("Q4", {"R"}, "ja")});
    auto run = test::make_run(ds);
    for (const auto& q : ds.queries)
        run.results[q.query_doc_id] = test::make_list(q.query_doc_id, {"R"});
    const auto t = breakdown_by(run, ds, Dimension::Language);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[0].stratum, "ja");
    EXPECT_EQ(t.rows[1].stratum, "en");
    EXPECT_EQ(t.rows[2].stratum, "zh");
}

TEST(Breakdown, SliceCountsSumToTotals) {
    const auto& s = synthetic_run();
    for (auto d : {Dimension::Language, Dimension::IpcSection, Dimension::IpcClass, Dimension::Jurisdiction}) {
        const auto t = breakdown_by(s.run, s.dataset, d);
        std::size_t n = 0, found = 0, relevant = 0;
        std::vector<std::size_t> hits(t.totals.curve.points.size(), 0);
        for (const auto& r : t.rows) {
            n += r.n_queries;
            found += r.recall.found;
            relevant += r.recall.relevant;
            for (std::size_t i = 0; i < hits.size(); ++i)
                hits[i] += r.curve.points[i].hits;
        }
        EXPECT_EQ(n, s.dataset.queries.size());
        EXPECT_EQ(found, t.totals.recall.found);
        EXPECT_EQ(relevant, t.totals.recall.relevant);
        for (std::size_t i = 0; i < hits.size(); ++i)
            EXPECT_EQ(hits[i], t.totals.curve.points[i].hits) << to_string(d) << " k=" << t.totals.curve.points[i].k;
    }
}

TEST(CrossLanguage, TenPairsFourRetrieved) {
    Corpus c(Date(2025, 1, 1));
    std::vector<QueryCase> cases;
    for (int i = 0; i < 5; ++i) {
        const auto q = "CN" + std::to_string(i);
        c.add_document(test::make_doc(q, "CN", "zh"));
        const auto r1 = "US" + std::to_string(2 * i), r2 = "US" + std::to_string(2 * i + 1);
        c.add_document(test::make_doc(r1));
        c.add_document(test::make_doc(r2));
        cases.push_back(test::make_case(q, {r1, r2}, "zh"));
    }
    const auto ds = test::make_dataset(cases);
    auto run = test::make_run(ds);
    run.results["CN0"] = test::make_list("CN0", {"US0", "US1"});
    run.results["CN1"] = test::make_list("CN1", {"X", "US2"});
    run.results["CN2"] = test::make_list("CN2", {"US5"});
    run.results["CN3"] = test::make_list("CN3", {});
    run.results["CN4"] = test::make_list("CN4", {"X"});
    const auto cells = cross_language_recall(run, ds, c);
    ASSERT_EQ(cells.size(), 2u);
    EXPECT_EQ(cells[0], (CrossLanguageCell{"zh", "en", 10, 4, 0.4}));
    EXPECT_EQ(cells[1], (CrossLanguageCell{"zh", "zh", 0, 0, std::nullopt}));
}

TEST(CrossLanguage, MarginalsMatchPairEnumeration) {
    const auto& s = synthetic_run();
    const auto cells = cross_language_recall(s.run, s.dataset, s.synth.corpus);
    // Pair enumeration straight from the dataset.
    std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& q : s.dataset.queries) {
        const auto& hits = s.run.results.at(q.query_doc_id).hits;
        for (const auto& [id, src] : q.relevant) {
            auto& p = pairs[{q.strata.language, s.synth.corpus.at(id).language}];
            ++p.first;
            p.second += std::any_of(hits.begin(), hits.end(), [&](const Hit& h) { return h.doc_id == id; });
        }
    }
    std::size_t total_pairs = 0, total_found = 0;
    for (const auto& c : cells) {
        const auto it = pairs.find({c.query_language, c.relevant_language});
        const auto expected = it == pairs.end() ? std::pair<std::size_t, std::size_t>{0, 0} : it->second;
        EXPECT_EQ(c.n_pairs, expected.first);
        EXPECT_EQ(c.n_retrieved, expected.second);
        total_pairs += c.n_pairs;
        total_found += c.n_retrieved;
    }
    const auto stats = recall_stats(query_outcomes(s.run, s.dataset), RecallAveraging::Micro, 100);
    EXPECT_EQ(total_pairs, stats.relevant);
    EXPECT_EQ(total_found, stats.found);
    // The bilingual corpus plants zh queries with en prior art.
    EXPECT_GT((pairs[{"zh", "en"}].first), 0u);
}

TEST(Format, PercentAndNumbers) {
    EXPECT_EQ(format_percent(0.17), "17%");
    EXPECT_EQ(format_percent(0.125), "12.5%");
    EXPECT_EQ(format_percent(0.0), "0%");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
    EXPECT_EQ(parse_report_format("svg-plot-data"), ReportFormat::Svg);
    EXPECT_THROW(parse_report_format("pdf"), std::invalid_argument);
}

TEST(Render, EmptyReportGivesHeaderOnlyCsvAndNoSvg) {
    const MetricsReport empty;
    const auto files = render_report(empty, all_report_formats());
    EXPECT_EQ(file(files, "detection.csv"), "dimension,stratum,n_queries,k,detection_rate\n");
    EXPECT_EQ(file(files, "recall.csv"), "dimension,stratum,n_queries,recall,recall_depth\n");
    for (const auto& [name, content] : files)
        EXPECT_FALSE(name.ends_with(".svg")) << name;
}

TEST(Render, CsvRoundTripsValues) {
    const auto f = test::published_fixture();
    ReportOptions opt;
    opt.dimensions = {Dimension::Language};
    const auto report = evaluation_report(f.novelty, "Novelty", f.dataset, nullptr, MatchRule::Exact, opt);
    const auto files = render_report(report, {ReportFormat::Csv});
    const auto det = parse_csv(file(files, "detection_exact.csv"));
    ASSERT_EQ(det.size(), 1 + kDefaultKGrid.size());
    const auto& sys = report.systems.front();
    for (std::size_t i = 0; i < kDefaultKGrid.size(); ++i) {
        EXPECT_EQ(det[i + 1][0], "overall");
        EXPECT_EQ(std::stoi(det[i + 1][3]), kDefaultKGrid[i]);
        EXPECT_EQ(std::stod(det[i + 1][4]), sys.curve.points[i].rate);
    }
    const auto rec = parse_csv(file(files, "recall_exact.csv"));
    EXPECT_EQ(std::stod(rec[1][3]), 0.43);
    EXPECT_EQ(rec[1][4], "100");
    const auto by_lang = parse_csv(file(files, "breakdown_language_exact.csv"));
    EXPECT_EQ(by_lang.size(), 1 + 2 * kDefaultKGrid.size());
}

TEST(Render, SvgForEachBreakdown) {
    const auto f = test::published_fixture();
    ReportOptions opt;
    opt.dimensions = {Dimension::Language, Dimension::Jurisdiction};
    const auto report = evaluation_report(f.novelty, "Novelty <A&B>", f.dataset, nullptr, MatchRule::Exact, opt);
    const auto files = render_report(report, {ReportFormat::Svg});
    ASSERT_EQ(files.size(), 4u);
    for (const auto& [name, svg] : files) {
        EXPECT_TRUE(svg.starts_with("<svg") || svg.starts_with("<?xml")) << name;
        EXPECT_NE(svg.find("</svg>"), std::string::npos);
        EXPECT_EQ(svg.find("<A&B>"), std::string::npos) << "unescaped text in " << name;
    }
}

TEST(Render, PublishedRowsInTextTable) {
    const auto f = test::published_fixture();
    ReportOptions opt;
    opt.dimensions = {};
    opt.bootstrap.n_resamples = 1000;
    const auto report =
        comparison_metrics_report(f.novelty, "Novelty", f.semantic, "Semantic", f.dataset, nullptr, MatchRule::Exact, opt);
    const auto text = render_table(report);
    EXPECT_NE(text.find("Novelty (exact)    17%   26%   31%    39%    46%    53%    59%     67%        0.43"),
              std::string::npos)
        << text;
    EXPECT_NE(text.find("Semantic (exact)   11%   16%   20%    24%    29%    33%    38%     44%        0.32"),
              std::string::npos)
        << text;
    EXPECT_NE(text.find("+15 pp"), std::string::npos);
    EXPECT_NE(text.find("+0.11"), std::string::npos);
}

TEST(Compare, DeltasFromIntegerCounts) {
    const auto f = test::published_fixture();
    ReportOptions opt;
    opt.bootstrap.n_resamples = 1000;
    const auto cmp = compare_systems(f.novelty, f.semantic, f.dataset, "Novelty", "Semantic", Matcher::exact(), opt);
    bool saw_top10 = false, saw_recall = false;
    for (const auto& r : cmp.rows) {
        if (r.dimension != "overall")
            continue;
        EXPECT_TRUE(r.significance.has_value());
        if (r.metric == "top10") {
            EXPECT_EQ(r.delta, 0.15);
            saw_top10 = true;
        }
        if (r.metric == "recall") {
            EXPECT_EQ(r.delta, 0.11);
            saw_recall = true;
        }
    }
    EXPECT_TRUE(saw_top10 && saw_recall);
}

TEST(Compare, HashMismatchIsIntegrityError) {
    auto f = test::published_fixture();
    f.semantic.dataset_manifest_hash = "0000";
    EXPECT_THROW(compare_systems(f.novelty, f.semantic, f.dataset, "A", "B", Matcher::exact(), ReportOptions{}),
                 IntegrityError);
}

TEST(Report, FamilyRuleNeedsCorpus) {
    const auto f = test::published_fixture();
    EXPECT_THROW(evaluation_report(f.novelty, "N", f.dataset, nullptr, MatchRule::Family, ReportOptions{}),
                 std::invalid_argument);
}

TEST(Report, CorpusHashMismatchIsIntegrityError) {
    const auto& s = synthetic_run();
    const auto other = generate_synthetic_corpus({.seed = 43});
    EXPECT_THROW(evaluation_report(s.run, "ref", s.dataset, &other.corpus, MatchRule::Exact, ReportOptions{}),
                 IntegrityError);
    const auto ok = evaluation_report(s.run, "ref", s.dataset, &s.synth.corpus, MatchRule::Exact, ReportOptions{});
    ASSERT_EQ(ok.systems.size(), 2u);
    EXPECT_EQ(ok.systems[0].rule, MatchRule::Exact);
    EXPECT_EQ(ok.systems[1].rule, MatchRule::Family);
}

TEST(Emit, WritesFilesAndRejectsUnwritableTarget) {
    const auto f = test::published_fixture();
    const auto report = evaluation_report(f.novelty, "Novelty", f.dataset, nullptr, MatchRule::Exact, ReportOptions{});
    test::TempDir dir("emit");
    const auto written = emit_report(report, dir / "out", all_report_formats());
    EXPECT_FALSE(written.empty());
    for (const auto& p : written)
        EXPECT_TRUE(std::filesystem::exists(p)) << p;
    EXPECT_FALSE(std::filesystem::exists(dir / "out" / ".nsbench-write-probe"));

    // A regular file where the directory should be.
    test::write_file(dir / "blocker", "x");
    EXPECT_THROW(emit_report(report, dir / "blocker" / "out", all_report_formats()), IoError);
    EXPECT_FALSE(std::filesystem::exists(dir / "blocker" / "out"));
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path()))
        ++entries;
    EXPECT_EQ(entries, 2u); // "out" and "blocker" only
}
