#include "nsbench/metrics.hpp"

#include "nsbench/error.hpp"
#include "nsbench/parallel.hpp"
#include "nsbench/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nsbench {

namespace {

constexpr std::string_view kMergedStratum = "(merged)";
constexpr std::size_t kMaxExhaustive = 2'000'000;

struct Sums {
    double num_a = 0, den_a = 0, num_b = 0, den_b = 0;

    void add(const PairedValues& v, std::size_t i, double times = 1.0) {
        num_a += times * v.num_a[i];
        den_a += times * v.den_a[i];
        num_b += times * v.num_b[i];
        den_b += times * v.den_b[i];
    }
    Sums& operator+=(const Sums& o) {
        num_a += o.num_a;
        den_a += o.den_a;
        num_b += o.num_b;
        den_b += o.den_b;
        return *this;
    }
    double diff() const {
        const double a = den_a > 0 ? num_a / den_a : 0.0;
        const double b = den_b > 0 ? num_b / den_b : 0.0;
        return a - b;
    }
};

struct WeightedSums {
    Sums sums;
    double weight = 0.0;
};

// Every multiset of size |group| drawn from `group`, with its probability under
// uniform sampling with replacement.
std::vector<WeightedSums> enumerate_stratum(const PairedValues& v, const std::vector<std::size_t>& group) {
    const std::size_t s = group.size();
    std::vector<WeightedSums> out;
    std::vector<std::size_t> counts(s, 0);
    const double log_norm = std::lgamma(static_cast<double>(s) + 1.0) - static_cast<double>(s) * std::log(static_cast<double>(s));
    // Recursive composition of s into s parts.
    auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
        if (pos + 1 == s) {
            counts[pos] = left;
            WeightedSums ws;
            double log_w = log_norm;
            for (std::size_t i = 0; i < s; ++i) {
                log_w -= std::lgamma(static_cast<double>(counts[i]) + 1.0);
                if (counts[i])
                    ws.sums.add(v, group[i], static_cast<double>(counts[i]));
            }
            ws.weight = std::exp(log_w);
            out.push_back(ws);
            return;
        }
        for (std::size_t c = 0; c <= left; ++c) {
            counts[pos] = c;
            self(self, pos + 1, left - c);
        }
    };
    rec(rec, 0, s);
    return out;
}

double binomial(std::size_t n, std::size_t k) {
    return std::exp(std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
                    std::lgamma(static_cast<double>(n - k) + 1));
}

// Smallest value whose cumulative weight reaches q (values sorted ascending).
double weighted_quantile(const std::vector<WeightedDiff>& sorted, double total, double q) {
    double cum = 0.0;
    for (const auto& w : sorted) {
        cum += w.weight;
        if (cum >= q * total - 1e-12)
            return w.diff;
    }
    return sorted.back().diff;
}

} // namespace

std::string MetricSpec::name() const {
    if (kind == Kind::DetectionAtK)
        return "top" + std::to_string(k);
    return "recall_" + std::string(to_string(averaging));
}

PairedValues paired_values(const std::vector<QueryOutcome>& a, const std::vector<QueryOutcome>& b,
                           const EvaluationDataset& dataset, const MetricSpec& metric,
                           const std::vector<Dimension>& strata) {
    if (a.size() != dataset.queries.size() || b.size() != dataset.queries.size())
        throw IntegrityError("paired outcomes do not cover the dataset");
    PairedValues v;
    auto fill = [&](const QueryOutcome& o, std::vector<double>& num, std::vector<double>& den) {
        switch (metric.kind) {
        case MetricSpec::Kind::DetectionAtK:
            num.push_back(o.first_relevant_rank && *o.first_relevant_rank <= metric.k ? 1.0 : 0.0);
            den.push_back(1.0);
            break;
        case MetricSpec::Kind::Recall:
            if (metric.averaging == RecallAveraging::Micro) {
                num.push_back(static_cast<double>(o.n_found));
                den.push_back(static_cast<double>(o.n_relevant));
            } else {
                num.push_back(o.n_relevant ? static_cast<double>(o.n_found) / static_cast<double>(o.n_relevant) : 0.0);
                den.push_back(1.0);
            }
            break;
        }
    };
    for (std::size_t i = 0; i < dataset.queries.size(); ++i) {
        fill(a[i], v.num_a, v.den_a);
        fill(b[i], v.num_b, v.den_b);
        std::string label;
        for (std::size_t d = 0; d < strata.size(); ++d) {
            if (d)
                label += "|";
            label += dataset.queries[i].strata.get(strata[d]);
        }
        v.stratum.push_back(strata.empty() ? "all" : label);
    }
    return v;
}

std::vector<std::vector<std::size_t>> stratum_groups(const std::vector<std::string>& labels,
                                                     std::vector<std::string>* warnings) {
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < labels.size(); ++i)
        by_label[labels[i]].push_back(i);
    std::vector<std::size_t> merged;
    std::vector<std::vector<std::size_t>> groups;
    for (auto& [label, idx] : by_label) {
        if (idx.size() < 2) {
            if (warnings)
                warnings->push_back("stratum '" + label + "' has " + std::to_string(idx.size()) +
                                    " query; merged into " + std::string(kMergedStratum));
            merged.insert(merged.end(), idx.begin(), idx.end());
        } else {
            groups.push_back(std::move(idx));
        }
    }
    if (!merged.empty()) {
        std::sort(merged.begin(), merged.end());
        groups.push_back(std::move(merged));
    }
    return groups;
}

std::vector<WeightedDiff> bootstrap_distribution(const PairedValues& values, const BootstrapOptions& options,
                                                 std::vector<std::string>* warnings) {
    const auto groups = stratum_groups(values.stratum, warnings);
    std::vector<WeightedDiff> out;

    if (options.exhaustive) {
        double combos = 1.0;
        for (const auto& g : groups)
            combos *= binomial(2 * g.size() - 1, g.size());
        if (combos > static_cast<double>(kMaxExhaustive))
            throw std::invalid_argument("exhaustive bootstrap would enumerate " + std::to_string(combos) +
                                        " resamples; use random mode");
        std::vector<WeightedSums> acc{WeightedSums{{}, 1.0}};
        for (const auto& g : groups) {
            const auto options_g = enumerate_stratum(values, g);
            std::vector<WeightedSums> next;
            next.reserve(acc.size() * options_g.size());
            for (const auto& a : acc)
                for (const auto& o : options_g) {
                    WeightedSums ws{a.sums, a.weight * o.weight};
                    ws.sums += o.sums;
                    next.push_back(ws);
                }
            acc.swap(next);
        }
        out.reserve(acc.size());
        for (const auto& ws : acc)
            out.push_back({ws.sums.diff(), ws.weight});
        return out;
    }

    if (options.n_resamples < 1000)
        throw std::invalid_argument("paired bootstrap needs at least 1000 resamples");
    out.resize(options.n_resamples);
    const double w = 1.0 / static_cast<double>(options.n_resamples);
    parallel_for(options.n_resamples, options.parallelism, [&](std::size_t b) {
        auto engine = make_stream(options.seed, b);
        Sums s;
        for (const auto& g : groups)
            for (std::size_t j = 0; j < g.size(); ++j)
                s.add(values, g[uniform_index(engine, g.size())]);
        out[b] = {s.diff(), w};
    });
    return out;
}

SignificanceResult paired_bootstrap(const std::vector<QueryOutcome>& a, const std::vector<QueryOutcome>& b,
                                    const EvaluationDataset& dataset, const MetricSpec& metric,
                                    const BootstrapOptions& options) {
    if (dataset.queries.empty())
        throw UndefinedMetricError("bootstrap undefined for an empty query set");
    const auto values = paired_values(a, b, dataset, metric, options.strata);

    SignificanceResult r;
    r.metric_name = metric.name();
    r.seed = options.seed;
    for (std::size_t d = 0; d < options.strata.size(); ++d)
        r.strata_spec += (d ? " x " : "") + std::string(to_string(options.strata[d]));
    if (r.strata_spec.empty())
        r.strata_spec = "none";

    Sums observed;
    for (std::size_t i = 0; i < values.num_a.size(); ++i)
        observed.add(values, i);
    r.observed_diff = observed.diff();

    auto dist = bootstrap_distribution(values, options, &r.warnings);
    r.n_resamples = dist.size();

    const double sign = r.observed_diff > 0 ? 1.0 : (r.observed_diff < 0 ? -1.0 : 0.0);
    double against = 0.0, total = 0.0;
    std::size_t against_count = 0;
    for (const auto& d : dist) {
        total += d.weight;
        if (d.diff * sign <= 0.0) {
            against += d.weight;
            ++against_count;
        }
    }
    if (options.exhaustive) {
        r.p_value = std::min(1.0, 2.0 * against / total);
    } else {
        const auto B = static_cast<double>(dist.size());
        r.p_value = std::min(1.0, 2.0 * (static_cast<double>(against_count) + 1.0) / (B + 1.0));
    }

    std::sort(dist.begin(), dist.end(), [](const WeightedDiff& x, const WeightedDiff& y) { return x.diff < y.diff; });
    if (options.exhaustive) {
        r.ci_low = weighted_quantile(dist, total, 0.025);
        r.ci_high = weighted_quantile(dist, total, 0.975);
    } else {
        auto at = [&](double q) {
            auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(dist.size())));
            idx = std::clamp<std::size_t>(idx, 1, dist.size()) - 1;
            return dist[idx].diff;
        };
        r.ci_low = at(0.025);
        r.ci_high = at(0.975);
    }
    return r;
}

SignificanceResult paired_bootstrap(const RunRecord& run_a, const RunRecord& run_b, const EvaluationDataset& dataset,
                                    const MetricSpec& metric, const BootstrapOptions& options,
                                    const Matcher& matcher) {
    return paired_bootstrap(query_outcomes(run_a, dataset, matcher), query_outcomes(run_b, dataset, matcher), dataset,
                            metric, options);
}

} // namespace nsbench
