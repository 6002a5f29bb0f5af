#include "nsbench/dataset.hpp"

#include "nsbench/error.hpp"
#include "nsbench/parallel.hpp"
#include "nsbench/rng.hpp"
#include "nsbench/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace nsbench {

std::string_view to_string(Dimension d) {
    switch (d) {
    case Dimension::Language: return "language";
    case Dimension::IpcSection: return "ipc_section";
    case Dimension::IpcClass: return "ipc_class";
    case Dimension::Jurisdiction: return "jurisdiction";
    }
    return "language";
}

Dimension parse_dimension(std::string_view s) {
    if (s == "language") return Dimension::Language;
    if (s == "ipc" || s == "ipc_section") return Dimension::IpcSection;
    if (s == "ipc_class") return Dimension::IpcClass;
    if (s == "jurisdiction" || s == "country") return Dimension::Jurisdiction;
    throw std::invalid_argument("unknown dimension '" + std::string(s) + "'");
}

const std::string& StratumLabels::get(Dimension d) const {
    switch (d) {
    case Dimension::Language: return language;
    case Dimension::IpcSection: return ipc_section;
    case Dimension::IpcClass: return ipc_class;
    case Dimension::Jurisdiction: return jurisdiction;
    }
    return language;
}

StratumLabels StratumLabels::of(const PatentDocument& doc) {
    return {doc.language, ipc_section_of(doc), ipc_class_of(doc), doc.jurisdiction};
}

std::set<std::string, std::less<>> QueryCase::relevant_ids() const {
    std::set<std::string, std::less<>> ids;
    for (const auto& [id, src] : relevant)
        ids.insert(id);
    return ids;
}

const QueryCase* EvaluationDataset::find(std::string_view query_id) const {
    auto it = std::lower_bound(queries.begin(), queries.end(), query_id,
                               [](const QueryCase& q, std::string_view id) { return q.query_doc_id < id; });
    if (it == queries.end() || it->query_doc_id != query_id)
        return nullptr;
    return &*it;
}

XCitationMap extract_x_citations(const Corpus& corpus) {
    XCitationMap out;
    for (const auto& c : corpus.citations()) {
        if (c.category != CitationCategory::X || c.source != CitationSource::Examiner)
            continue;
        if (!corpus.contains(c.cited_id))
            continue;
        out[c.citing_id].insert(c.cited_id);
    }
    return out;
}

DistributionProfile profile_distributions(const Corpus& corpus) {
    DistributionProfile p;
    std::map<std::string, std::size_t> category_counts;
    std::size_t examiner_total = 0;
    for (const auto& c : corpus.citations()) {
        if (c.source != CitationSource::Examiner)
            continue;
        ++category_counts[std::string(to_string(c.category))];
        ++examiner_total;
    }
    for (const auto& [cat, n] : category_counts)
        p.citation_type_proportions[cat] = static_cast<double>(n) / static_cast<double>(examiner_total);

    const auto xmap = extract_x_citations(corpus);
    std::set<std::string> cited;
    for (const auto& [citing, targets] : xmap) {
        const auto& doc = corpus.at(citing);
        ++p.language_counts_primary[doc.language];
        ++p.jurisdiction_counts[doc.jurisdiction];
        ++p.ipc_section_counts[ipc_section_of(doc)];
        cited.insert(targets.begin(), targets.end());
    }
    for (const auto& id : cited)
        ++p.language_counts_cited[corpus.at(id).language];
    if (!corpus.documents().empty())
        p.x_patent_fraction = static_cast<double>(xmap.size()) / static_cast<double>(corpus.documents().size());
    return p;
}

CaseMap augment_with_family_citations(const Corpus& corpus, const XCitationMap& base,
                                      const AlignmentScorer& scorer, AugmentOptions options,
                                      std::vector<std::string>* warnings) {
    if (!(options.threshold >= 0.0 && options.threshold <= 1.0))
        throw std::invalid_argument("alignment threshold must lie in [0, 1], got " +
                                    std::to_string(options.threshold));

    struct Pair {
        const PatentDocument* main;
        const PatentDocument* member;
        std::optional<double> score;
        std::string failure;
    };
    std::vector<Pair> pairs;
    for (const auto& [main_id, unused] : base)
        for (const auto* member : family_members(corpus, main_id))
            pairs.push_back({&corpus.at(main_id), member, std::nullopt, {}});

    parallel_for(pairs.size(), options.parallelism, [&](std::size_t i) {
        try {
            pairs[i].score = alignment_score(*pairs[i].main, *pairs[i].member, scorer).value;
        } catch (const std::exception& e) {
            pairs[i].failure = e.what();
        }
    });

    CaseMap cases;
    for (const auto& [main_id, examiner] : base) {
        QueryCase qc;
        qc.query_doc_id = main_id;
        qc.strata = StratumLabels::of(corpus.at(main_id));
        for (const auto& id : examiner)
            qc.relevant.emplace(id, CitationSource::Examiner);
        cases.emplace(main_id, std::move(qc));
    }

    // pairs are grouped by main patent in base order, members in doc_id order.
    for (const auto& pair : pairs) {
        const auto& main_id = pair.main->doc_id;
        if (!pair.score) {
            if (warnings)
                warnings->push_back("alignment failed for " + main_id + " / " + pair.member->doc_id +
                                    ", member skipped: " + pair.failure);
            continue;
        }
        if (*pair.score < options.threshold)
            continue;
        auto member_x = base.find(pair.member->doc_id);
        if (member_x == base.end())
            continue;
        const auto& family = corpus.families().at(pair.main->family_id);
        auto& qc = cases.at(main_id);
        for (const auto& cited : member_x->second) {
            if (std::binary_search(family.begin(), family.end(), cited))
                continue;
            qc.relevant.emplace(cited, CitationSource::FamilyDerived);
        }
    }
    return cases;
}

FilterResult apply_quality_filters(const CaseMap& cases, const Corpus& corpus, int recency_years) {
    if (recency_years < 0)
        throw std::invalid_argument("recency_years must be non-negative");
    const Date cutoff = corpus.reference_date().minus_years(recency_years);
    FilterResult r;
    for (const auto& [id, qc] : cases) {
        const auto* doc = corpus.find(id);
        std::string reason;
        if (!doc)
            reason = "query patent not in corpus";
        else if (doc->filing_date < cutoff)
            reason = "filed " + doc->filing_date.to_string() + ", before recency cutoff " + cutoff.to_string();
        else if (doc->filing_date > corpus.reference_date())
            reason = "filed after reference date";
        else if (text::trim(doc->description).empty())
            reason = "empty description";
        else if (qc.relevant.empty())
            reason = "empty relevant set";
        if (reason.empty())
            r.cases.emplace(id, qc);
        else
            r.excluded.emplace_back(id, std::move(reason));
    }
    return r;
}

std::vector<std::size_t> largest_remainder(const std::vector<double>& weights, std::size_t total) {
    std::vector<std::size_t> seats(weights.size(), 0);
    if (total == 0 || weights.empty())
        return seats;
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(sum > 0.0))
        throw std::invalid_argument("largest_remainder: weights must have a positive sum");

    std::vector<double> remainder(weights.size());
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double quota = weights[i] / sum * static_cast<double>(total);
        double whole = std::floor(quota);
        // Absorb representation error such as 0.29 * 100 = 28.999999999999996.
        if (quota - whole > 1.0 - 1e-9)
            whole += 1.0;
        seats[i] = static_cast<std::size_t>(whole);
        remainder[i] = std::max(0.0, quota - whole);
        assigned += seats[i];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < total; i = (i + 1) % order.size()) {
        if (weights[order[i]] <= 0.0)
            continue;
        ++seats[order[i]];
        ++assigned;
    }
    while (assigned > total) {
        // Only reachable when the epsilon bump above overshoots; take back from the smallest remainder.
        for (auto it = order.rbegin(); it != order.rend() && assigned > total; ++it)
            if (seats[*it] > 0) {
                --seats[*it];
                --assigned;
            }
    }
    return seats;
}

std::map<std::string, std::size_t> allocate_strata(const std::map<std::string, double>& targets,
                                                   const std::map<std::string, std::size_t>& available,
                                                   std::size_t sample_size) {
    std::vector<std::string> labels;
    std::vector<double> weights;
    for (const auto& [label, p] : targets)
        if (p > 0.0) {
            labels.push_back(label);
            weights.push_back(p);
        }
    std::map<std::string, std::size_t> alloc;
    for (const auto& [label, p] : targets)
        alloc[label] = 0;
    if (sample_size == 0)
        return alloc;
    if (labels.empty())
        throw InfeasibleTargetsError("", "no stratum has a positive target proportion");

    auto avail = [&](const std::string& label) {
        auto it = available.find(label);
        return it == available.end() ? std::size_t{0} : it->second;
    };

    const auto first = largest_remainder(weights, sample_size);
    std::vector<std::size_t> quota = first;
    std::vector<bool> capped(labels.size(), false);

    // Stratum with the largest unmet demand in the first pass names the failure.
    std::string culprit;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (first[i] > avail(labels[i]) && first[i] - avail(labels[i]) > worst) {
            worst = first[i] - avail(labels[i]);
            culprit = labels[i];
        }

    for (;;) {
        std::size_t shortfall = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (quota[i] > avail(labels[i])) {
                shortfall += quota[i] - avail(labels[i]);
                quota[i] = avail(labels[i]);
                capped[i] = true;
            }
        }
        if (shortfall == 0)
            break;
        std::vector<double> open_weights(labels.size(), 0.0);
        bool any_open = false;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (!capped[i]) {
                open_weights[i] = weights[i];
                any_open = true;
            }
        if (!any_open)
            throw InfeasibleTargetsError(culprit, "infeasible targets: stratum '" + culprit + "' demands " +
                                                      std::to_string(first[std::find(labels.begin(), labels.end(), culprit) - labels.begin()]) +
                                                      " cases but only " + std::to_string(avail(culprit)) +
                                                      " exist and no other stratum can absorb " +
                                                      std::to_string(shortfall) + " more");
        const auto extra = largest_remainder(open_weights, shortfall);
        for (std::size_t i = 0; i < labels.size(); ++i)
            quota[i] += extra[i];
    }
    for (std::size_t i = 0; i < labels.size(); ++i)
        alloc[labels[i]] = quota[i];
    return alloc;
}

StratumTargets empirical_targets(const CaseMap& cases, Dimension dimension) {
    StratumTargets t{dimension, {}};
    std::map<std::string, std::size_t> counts;
    for (const auto& [id, qc] : cases)
        ++counts[qc.strata.get(dimension)];
    for (const auto& [label, n] : counts)
        t.proportions[label] = static_cast<double>(n) / static_cast<double>(cases.size());
    return t;
}

EvaluationDataset assemble_dataset(const CaseMap& cases, const DistributionProfile& profile,
                                   const StratumTargets& targets, std::size_t sample_size,
                                   std::uint64_t seed, DatasetManifest manifest) {
    if (sample_size > cases.size())
        throw std::invalid_argument("sample_size " + std::to_string(sample_size) + " exceeds " +
                                    std::to_string(cases.size()) + " available cases");
    double sum = 0.0;
    for (const auto& [label, p] : targets.proportions) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("target proportion for '" + label + "' outside [0, 1]");
        sum += p;
    }
    if (sample_size > 0 && std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("target proportions sum to " + std::to_string(sum) + ", expected 1");

    std::map<std::string, std::vector<std::string>> pool;
    for (const auto& [id, qc] : cases)
        pool[qc.strata.get(targets.dimension)].push_back(id);
    std::map<std::string, std::size_t> available;
    for (const auto& [label, ids] : pool)
        available[label] = ids.size();

    const auto allocation = allocate_strata(targets.proportions, available, sample_size);

    EvaluationDataset ds;
    for (const auto& [label, count] : allocation) {
        if (count == 0)
            continue;
        auto ids = pool.at(label);
        auto engine = make_stream(seed, label_stream_id(label));
        shuffle_in_place(ids, engine);
        for (std::size_t i = 0; i < count; ++i)
            ds.queries.push_back(cases.find(ids[i])->second);
    }
    std::sort(ds.queries.begin(), ds.queries.end(),
              [](const QueryCase& a, const QueryCase& b) { return a.query_doc_id < b.query_doc_id; });

    manifest.seed = seed;
    manifest.targets = targets;
    manifest.sample_size = sample_size;
    manifest.allocation = allocation;
    manifest.profile = profile;
    std::size_t augmented = 0;
    for (const auto& q : ds.queries)
        augmented += std::any_of(q.relevant.begin(), q.relevant.end(),
                                 [](const auto& kv) { return kv.second == CitationSource::FamilyDerived; });
    manifest.family_augmented_fraction =
        ds.queries.empty() ? 0.0 : static_cast<double>(augmented) / static_cast<double>(ds.queries.size());
    ds.manifest = std::move(manifest);
    return ds;
}

namespace {

std::string format_threshold(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", t);
    return buf;
}

} // namespace

BuildOutcome build_dataset(const Corpus& corpus, const AlignmentScorer& scorer, const BuildConfig& config) {
    BuildOutcome out;
    const auto base = extract_x_citations(corpus);
    const auto profile = profile_distributions(corpus);
    const auto augmented = augment_with_family_citations(corpus, base, scorer,
                                                         {config.threshold, config.parallelism}, &out.warnings);
    auto filtered = apply_quality_filters(augmented, corpus, config.recency_years);
    out.excluded = std::move(filtered.excluded);

    DatasetManifest manifest;
    manifest.threshold = config.threshold;
    manifest.scorer_id = scorer.id();
    manifest.recency_years = config.recency_years;
    manifest.corpus_hash = corpus.content_hash();
    manifest.filters = {"x_category_examiner_only", "dangling_cited_excluded",
                        "family_alignment>=" + format_threshold(config.threshold),
                        "family_self_references_dropped",
                        "recency<=" + std::to_string(config.recency_years) + "y_inclusive",
                        "nonempty_description", "nonempty_relevant_set"};
    manifest.candidate_cases = augmented.size();
    manifest.filtered_cases = filtered.cases.size();

    const auto targets = config.targets ? *config.targets : empirical_targets(filtered.cases, Dimension::Jurisdiction);
    const auto sample = config.sample_size ? *config.sample_size : filtered.cases.size();
    out.dataset = assemble_dataset(filtered.cases, profile, targets, sample, config.seed, std::move(manifest));
    return out;
}

} // namespace nsbench
