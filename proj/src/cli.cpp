#include "nsbench/cli.hpp"

#include "nsbench/corpus.hpp"
#include "nsbench/dataset.hpp"
#include "nsbench/error.hpp"
#include "nsbench/execution.hpp"
#include "nsbench/reference.hpp"
#include "nsbench/remote.hpp"
#include "nsbench/report.hpp"
#include "nsbench/synthetic.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace nsbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliConfig {
    std::string corpus;
    std::string dataset;
    std::string targets;
    std::string scores;
    std::string run_a;
    std::string run_b;
    std::string name_a;
    std::string name_b;
    std::string adapter = "reference";
    std::string adapter_config;
    std::string out;

    std::uint64_t seed = 0;
    double threshold = 0.90;
    int recency_years = 10;
    std::optional<std::size_t> sample_size;
    std::size_t max_depth = 100;
    std::int64_t timeout_ms = 30000;
    int parallelism = 1;
    bool include_family = false;
    bool sanitized = false;
    bool lenient = false;

    std::string k_grid = "1,3,5,10,20,30,50,100";
    std::string match_rule = "exact";
    std::string dimensions = "language,ipc_section,jurisdiction";
    std::string strata = "language,ipc_section";
    std::string formats = "table-text,csv,svg";
    std::size_t resamples = 10000;
    bool macro = false;

    std::uint64_t synth_seed = 42;
    bool monolingual = false;
    bool defects = false;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

std::vector<int> parse_k_grid(const std::string& s) {
    std::vector<int> ks;
    for (const auto& item : split_list(s)) {
        std::size_t used = 0;
        int k = 0;
        try {
            k = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || k < 1)
            throw std::invalid_argument("--k-grid entries must be positive integers, got '" + item + "'");
        if (!ks.empty() && k <= ks.back())
            throw std::invalid_argument("--k-grid must be strictly increasing");
        ks.push_back(k);
    }
    if (ks.empty())
        throw std::invalid_argument("--k-grid is empty");
    return ks;
}

std::vector<Dimension> parse_dimensions(const std::string& s) {
    std::vector<Dimension> out;
    for (const auto& item : split_list(s))
        out.push_back(parse_dimension(item));
    return out;
}

std::vector<ReportFormat> parse_formats(const std::string& s) {
    std::vector<ReportFormat> out;
    for (const auto& item : split_list(s))
        out.push_back(parse_report_format(item));
    if (out.empty())
        throw std::invalid_argument("--formats is empty");
    return out;
}

StratumTargets load_targets(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read targets file " + path.string());
    try {
        const auto j = json::parse(in);
        StratumTargets t;
        t.dimension = parse_dimension(j.value("dimension", "jurisdiction"));
        j.at("proportions").get_to(t.proportions);
        return t;
    } catch (const json::exception& e) {
        throw ParseError("targets file " + path.string() + ": " + e.what());
    }
}

void require_parent_dir(const std::string& path, const char* flag) {
    const auto parent = fs::absolute(path).parent_path();
    if (!fs::is_directory(parent))
        throw std::invalid_argument(std::string(flag) + ": directory " + parent.string() + " does not exist");
}

Corpus load_checked_corpus(const std::string& path, bool lenient, std::ostream& err) {
    auto loaded = load_corpus(path, {lenient});
    for (const auto& note : loaded.report.notes)
        err << "note: " << note << "\n";
    for (const auto& issue : loaded.report.skipped)
        err << "skipped line " << issue.line << ": " << issue.reason << "\n";
    return std::move(loaded.corpus);
}

void check_corpus_matches(const Corpus& corpus, const EvaluationDataset& dataset) {
    if (corpus.content_hash() != dataset.manifest.corpus_hash)
        throw IntegrityError("corpus hashes to " + corpus.content_hash() + " but the dataset was built from " +
                             dataset.manifest.corpus_hash);
}

ReportOptions report_options(const CliConfig& c) {
    ReportOptions o;
    o.ks = parse_k_grid(c.k_grid);
    o.dimensions = parse_dimensions(c.dimensions);
    o.averaging = c.macro ? RecallAveraging::Macro : RecallAveraging::Micro;
    o.bootstrap.seed = c.seed;
    o.bootstrap.n_resamples = c.resamples;
    o.bootstrap.strata = parse_dimensions(c.strata);
    o.bootstrap.parallelism = c.parallelism;
    return o;
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", v * 100.0);
    return buf;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_build_dataset(const CliConfig& c, std::ostream& out, std::ostream& err) {
    require_parent_dir(c.out, "--out");
    const auto corpus = load_checked_corpus(c.corpus, c.lenient, err);

    BuildConfig config;
    config.seed = c.seed;
    config.threshold = c.threshold;
    config.recency_years = c.recency_years;
    config.parallelism = c.parallelism;
    config.sample_size = c.sample_size;
    if (!c.targets.empty())
        config.targets = load_targets(c.targets);

    std::unique_ptr<AlignmentScorer> scorer;
    if (c.scores.empty())
        scorer = std::make_unique<TrigramJaccardScorer>();
    else
        scorer = std::make_unique<TableAlignmentScorer>(TableAlignmentScorer::load(c.scores));

    const auto outcome = build_dataset(corpus, *scorer, config);
    write_dataset(c.out, outcome.dataset);

    const auto& m = outcome.dataset.manifest;
    out << "dataset: " << c.out << "\n";
    out << "dataset hash: " << dataset_hash(outcome.dataset) << "\n";
    out << "seed: " << m.seed << "\n";
    out << "scorer: " << m.scorer_id << ", threshold " << m.threshold << ", recency " << m.recency_years
        << " years\n";
    out << "candidate cases: " << m.candidate_cases << ", after filters: " << m.filtered_cases
        << ", sampled: " << outcome.dataset.queries.size() << "\n";
    out << "family-augmented cases: " << percent(m.family_augmented_fraction) << "\n";
    out << "allocation by " << to_string(m.targets.dimension) << ":\n";
    for (const auto& [label, n] : m.allocation) {
        const auto it = m.targets.proportions.find(label);
        out << "  " << label << ": " << n << " (target " << percent(it == m.targets.proportions.end() ? 0.0 : it->second)
            << ")\n";
    }
    out << "corpus profile: " << percent(m.profile.x_patent_fraction) << " of patents hold an X citation\n";
    for (const auto& [type, share] : m.profile.citation_type_proportions)
        out << "  citation type " << type << ": " << percent(share) << "\n";
    std::map<std::string, std::size_t> reasons;
    for (const auto& [id, reason] : outcome.excluded)
        ++reasons[reason.find(", ") == std::string::npos ? reason : reason.substr(reason.find(", ") + 2)];
    for (const auto& [reason, n] : reasons)
        out << "excluded (" << reason << "): " << n << "\n";
    for (const auto& w : outcome.warnings)
        err << "warning: " << w << "\n";
    return kExitOk;
}

std::shared_ptr<SystemAdapter> make_adapter(const CliConfig& c, const Corpus& corpus) {
    std::string kind = c.adapter;
    std::string config = c.adapter_config;
    if (kind.starts_with("remote:")) {
        config = kind.substr(7);
        kind = "remote";
    }
    if (kind == "reference")
        return std::make_shared<ReferenceAdapter>(std::make_shared<const ReferenceIndex>(ReferenceIndex::build(corpus)));
    if (kind == "remote") {
        if (config.empty())
            throw std::invalid_argument("the remote adapter needs --adapter-config");
        return std::make_shared<RemoteAdapter>(RemoteEndpointConfig::load(config));
    }
    throw std::invalid_argument("unknown adapter '" + c.adapter + "' (expected reference or remote)");
}

void print_tally(const RunRecord& run, std::ostream& out) {
    std::size_t ok = 0, timeout = 0, error = 0;
    for (const auto& [id, list] : run.results) {
        ok += list.status == QueryStatus::Ok;
        timeout += list.status == QueryStatus::Timeout;
        error += list.status == QueryStatus::Error;
    }
    out << "results: " << ok << " ok, " << timeout << " timeout, " << error << " error";
    if (run.anomalies)
        out << ", " << run.anomalies << " unmappable hits dropped";
    out << "\n";
}

int cmd_run(const CliConfig& c, std::ostream& out, std::ostream& err) {
    require_parent_dir(c.out, "--out");
    if (c.adapter == "remote" && !c.adapter_config.empty() && !fs::is_regular_file(c.adapter_config))
        throw std::invalid_argument("--adapter-config: file " + c.adapter_config + " does not exist");

    RunControls controls;
    controls.seed = c.seed;
    controls.timeout_ms = c.timeout_ms;
    controls.max_depth = c.max_depth;
    controls.parallelism = c.parallelism;
    controls.exclude_family = !c.include_family;
    controls.validate();

    const auto dataset = load_dataset(c.dataset);
    const auto corpus = load_checked_corpus(c.corpus, false, err);
    check_corpus_matches(corpus, dataset);
    const auto adapter = make_adapter(c, corpus);
    controls.adapter_id = adapter->id();

    const std::size_t step = std::max<std::size_t>(1, dataset.queries.size() / 10);
    auto progress = [&](std::size_t done, std::size_t total, const RankedList& list) {
        if (list.status != QueryStatus::Ok)
            err << "query " << list.query_id << ": " << to_string(list.status) << " " << list.error << "\n";
        if (done % step == 0 || done == total)
            err << "progress: " << done << "/" << total << "\n";
    };

    out << "running " << dataset.queries.size() << " queries on " << controls.adapter_id << " (depth "
        << controls.max_depth << ", " << controls.parallelism << " workers, seed " << controls.seed << ")\n";
    try {
        const auto run = run_evaluation(dataset, corpus, adapter, controls, progress);
        write_run_log(c.out, run, c.sanitized);
        print_tally(run, out);
        out << "run log: " << c.out << "\n";
        return kExitOk;
    } catch (const RunAbortedError& e) {
        write_run_log(c.out, e.partial(), c.sanitized);
        print_tally(e.partial(), out);
        err << "error: " << e.what() << "; partial log written to " << c.out << "\n";
        return kExitRunFailed;
    }
}

int cmd_evaluate(const CliConfig& c, std::ostream& out, std::ostream& err) {
    const auto options = report_options(c);
    const auto formats = parse_formats(c.formats);
    const auto rule = parse_match_rule(c.match_rule);
    const auto dataset = load_dataset(c.dataset);
    const auto run = load_run_log(c.run_a);
    std::optional<Corpus> corpus;
    if (!c.corpus.empty())
        corpus = load_checked_corpus(c.corpus, false, err);

    auto report = evaluation_report(run, c.name_a.empty() ? run.controls.adapter_id : c.name_a, dataset,
                                    corpus ? &*corpus : nullptr, rule, options);
    report.seed = c.seed;
    emit_report(report, c.out, formats);
    out << render_table(report);
    out << "\nreport written to " << c.out << "\n";
    return kExitOk;
}

int cmd_compare(const CliConfig& c, std::ostream& out, std::ostream& err) {
    const auto options = report_options(c);
    const auto formats = parse_formats(c.formats);
    const auto rule = parse_match_rule(c.match_rule);
    const auto dataset = load_dataset(c.dataset);
    const auto run_a = load_run_log(c.run_a);
    const auto run_b = load_run_log(c.run_b);
    std::optional<Corpus> corpus;
    if (!c.corpus.empty())
        corpus = load_checked_corpus(c.corpus, false, err);

    std::string name_a = c.name_a.empty() ? run_a.controls.adapter_id : c.name_a;
    std::string name_b = c.name_b.empty() ? run_b.controls.adapter_id : c.name_b;
    if (name_a == name_b) {
        name_a += "-a";
        name_b += "-b";
    }
    const auto report =
        comparison_metrics_report(run_a, name_a, run_b, name_b, dataset, corpus ? &*corpus : nullptr, rule, options);
    emit_report(report, c.out, formats);
    out << render_table(report);
    out << "\nreport written to " << c.out << "\n";
    return kExitOk;
}

int cmd_validate_corpus(const CliConfig& c, std::ostream& out, std::ostream& err) {
    const auto corpus = load_checked_corpus(c.corpus, c.lenient, err);
    const auto r = validate_corpus(corpus);
    out << "documents: " << r.doc_count << "\n";
    out << "citations: " << r.citation_count << "\n";
    out << "reference date: " << corpus.reference_date().to_string() << "\n";
    out << "content hash: " << corpus.content_hash() << "\n";
    out << "dangling citations: " << r.dangling_citations.size() << "\n";
    for (const auto& d : r.dangling_citations)
        out << "  " << d.citing_id << " -> " << d.cited_id << " (" << to_string(d.category) << ")\n";
    out << "malformed documents: " << r.malformed_docs.size() << "\n";
    for (const auto& [id, why] : r.malformed_docs)
        out << "  " << id << ": " << why << "\n";
    out << "empty sections: " << r.empty_sections.size() << "\n";
    for (const auto& [id, section] : r.empty_sections)
        out << "  " << id << ": " << section << "\n";
    return kExitOk;
}

int cmd_synth_corpus(const CliConfig& c, std::ostream& out, std::ostream&) {
    require_parent_dir(c.out, "--out");
    SyntheticOptions o;
    o.seed = c.synth_seed;
    o.monolingual = c.monolingual;
    o.plant_defects = c.defects;
    const auto synth = generate_synthetic_corpus(o);
    write_corpus(c.out, synth.corpus);
    out << "wrote " << synth.corpus.documents().size() << " documents and " << synth.corpus.citations().size()
        << " citations to " << c.out << "\n";
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CliConfig c;
    CLI::App app{"Patent novelty search evaluation harness", "nsbench"};
    app.require_subcommand(1);

    auto add_seed = [&](CLI::App* s) { s->add_option("--seed", c.seed, "Random seed")->capture_default_str(); };
    auto add_parallelism = [&](CLI::App* s) {
        s->add_option("--parallelism", c.parallelism, "Worker threads")->check(CLI::Range(1, 256))
            ->capture_default_str();
    };
    auto add_metric_flags = [&](CLI::App* s) {
        s->add_option("--k-grid", c.k_grid, "Comma-separated cutoffs")->capture_default_str();
        s->add_option("--match-rule", c.match_rule, "exact or family")
            ->check(CLI::IsMember({"exact", "family"}))
            ->capture_default_str();
        s->add_option("--dimensions", c.dimensions, "Breakdown dimensions (language, ipc_section, ipc_class, "
                                                    "jurisdiction)")
            ->capture_default_str();
        s->add_option("--formats", c.formats, "table-text, csv, svg")->capture_default_str();
        s->add_flag("--macro", c.macro, "Macro-averaged recall instead of micro");
        s->add_option("--out", c.out, "Output directory")->required();
        s->add_option("--corpus", c.corpus, "Corpus JSONL (enables the family match rule)")
            ->check(CLI::ExistingFile);
        s->add_option("--dataset", c.dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
    };

    auto* build = app.add_subcommand("build-dataset", "Build an evaluation dataset from a corpus");
    build->add_option("--corpus", c.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    build->add_option("--targets", c.targets, "JSON stratum targets")->check(CLI::ExistingFile);
    build->add_option("--scores", c.scores, "JSONL table of family alignment scores")->check(CLI::ExistingFile);
    build->add_option("--threshold", c.threshold, "Family alignment threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    build->add_option("--recency-years", c.recency_years, "Recency window in years")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    build->add_option("--sample-size", c.sample_size, "Number of queries to sample");
    build->add_option("--out", c.out, "Dataset output path")->required();
    build->add_flag("--lenient", c.lenient, "Skip malformed corpus lines");
    add_seed(build);
    add_parallelism(build);

    auto* run = app.add_subcommand("run", "Run a system over a dataset and write a run log");
    run->add_option("--dataset", c.dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
    run->add_option("--corpus", c.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    run->add_option("--adapter", c.adapter, "reference, remote or remote:<config>")->capture_default_str();
    run->add_option("--adapter-config", c.adapter_config, "Remote adapter JSON config")->check(CLI::ExistingFile);
    run->add_option("--max-depth", c.max_depth, "Result list depth")->check(CLI::PositiveNumber)
        ->capture_default_str();
    run->add_option("--timeout-ms", c.timeout_ms, "Per-query timeout")->check(CLI::PositiveNumber)
        ->capture_default_str();
    run->add_flag("--include-family", c.include_family, "Keep the query patent's family members in results");
    run->add_flag("--sanitized", c.sanitized, "Blank timestamps and latencies in the log");
    run->add_option("--out", c.out, "Run log output path")->required();
    add_seed(run);
    add_parallelism(run);

    auto* evaluate = app.add_subcommand("evaluate", "Compute metrics and breakdowns for one run");
    evaluate->add_option("--run", c.run_a, "Run log")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--name", c.name_a, "System name in reports (default: adapter id)");
    add_metric_flags(evaluate);
    add_seed(evaluate);

    auto* compare = app.add_subcommand("compare", "Compare two runs with paired bootstrap significance");
    compare->add_option("--run-a", c.run_a, "Run log of system A")->required()->check(CLI::ExistingFile);
    compare->add_option("--run-b", c.run_b, "Run log of system B")->required()->check(CLI::ExistingFile);
    compare->add_option("--name-a", c.name_a, "Name of system A");
    compare->add_option("--name-b", c.name_b, "Name of system B");
    compare->add_option("--strata", c.strata, "Bootstrap strata dimensions")->capture_default_str();
    compare->add_option("--resamples", c.resamples, "Bootstrap resamples")
        ->check(CLI::Range(std::size_t{1000}, std::size_t{10'000'000}))
        ->capture_default_str();
    add_metric_flags(compare);
    add_seed(compare);
    add_parallelism(compare);

    auto* validate = app.add_subcommand("validate-corpus", "Report structural and semantic corpus defects");
    validate->add_option("--corpus", c.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    validate->add_flag("--lenient", c.lenient, "Skip malformed corpus lines");

    auto* synth = app.add_subcommand("synth-corpus", "Write the deterministic synthetic corpus");
    synth->add_option("--out", c.out, "Corpus output path")->required();
    synth->add_flag("--monolingual", c.monolingual, "English-only documents");
    synth->add_flag("--defects", c.defects, "Add documents with validation defects");
    synth->add_option("--seed", c.synth_seed, "Random seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (build->parsed())
            return cmd_build_dataset(c, out, err);
        if (run->parsed())
            return cmd_run(c, out, err);
        if (evaluate->parsed())
            return cmd_evaluate(c, out, err);
        if (compare->parsed())
            return cmd_compare(c, out, err);
        if (validate->parsed())
            return cmd_validate_corpus(c, out, err);
        return cmd_synth_corpus(c, out, err);
    } catch (const IntegrityError& e) {
        err << "integrity error: " << e.what() << "\n";
        return kExitIntegrity;
    } catch (const InfeasibleTargetsError& e) {
        err << "infeasible targets: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

} // namespace nsbench
