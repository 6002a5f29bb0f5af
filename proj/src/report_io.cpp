#include "nsbench/report.hpp"

#include "nsbench/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nsbench {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kDetectionHeader = "dimension,stratum,n_queries,k,detection_rate";
constexpr std::string_view kRecallHeader = "dimension,stratum,n_queries,recall,recall_depth";
constexpr std::string_view kCrossHeader = "query_language,relevant_language,n_pairs,n_retrieved,recall";
constexpr std::string_view kComparisonHeader =
    "dimension,stratum,n_queries,metric,value_a,value_b,system,delta,p_value,ci_low,ci_high";

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string safe_name(std::string s) {
    for (auto& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.')
            c = '_';
    return s;
}

// Left-aligned first column, right-aligned rest.
std::string layout(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (width.size() <= i)
                width.push_back(0);
            width[i] = std::max(width[i], r[i].size());
        }
    std::string out;
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const std::string pad(width[i] - r[i].size(), ' ');
            if (i == 0)
                line += r[i] + pad;
            else
                line += "  " + pad + r[i];
        }
        while (!line.empty() && line.back() == ' ')
            line.pop_back();
        out += line + "\n";
    }
    return out;
}

std::string recall_label(std::size_t depth) { return "Recall@" + std::to_string(depth); }

std::string format_pp(double delta) {
    const double pp = delta * 100.0;
    if (std::abs(pp - std::round(pp)) < 1e-9)
        return fmt("%+.0f pp", std::round(pp) == 0 ? 0.0 : pp);
    return fmt("%+.1f pp", pp);
}

std::vector<std::string> curve_header(const std::vector<int>& ks, std::string first, std::size_t depth,
                                      bool with_queries) {
    std::vector<std::string> h{std::move(first)};
    if (with_queries)
        h.push_back("Queries");
    for (int k : ks)
        h.push_back("Top" + std::to_string(k));
    h.push_back(recall_label(depth));
    return h;
}

std::vector<std::string> curve_cells(std::string first, const DetectionCurve& c, const RecallStats& r,
                                     std::optional<std::size_t> n) {
    std::vector<std::string> row{std::move(first)};
    if (n)
        row.push_back(std::to_string(*n));
    for (const auto& p : c.points)
        row.push_back(format_percent(p.rate));
    row.push_back(fmt("%.2f", r.value));
    return row;
}

std::string rule_suffix(MatchRule rule) { return "_" + std::string(to_string(rule)); }

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

class SvgChart {
public:
    static constexpr double kWidth = 640, kHeight = 400;
    static constexpr double kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;

    explicit SvgChart(const std::string& title) {
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
             << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
        out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        text(kWidth / 2 - kRight / 2 + kLeft / 2, 22, title, "middle", 14);
        for (int i = 0; i <= 5; ++i) {
            const double v = i / 5.0;
            const double y = y_of(v);
            out_ << "<line x1=\"" << n(kLeft) << "\" y1=\"" << n(y) << "\" x2=\"" << n(kWidth - kRight)
                 << "\" y2=\"" << n(y) << "\" stroke=\"#dddddd\"/>\n";
            text(kLeft - 6, y + 4, fmt("%.1f", v), "end", 11);
        }
        out_ << "<line x1=\"" << n(kLeft) << "\" y1=\"" << n(y_of(0)) << "\" x2=\"" << n(kWidth - kRight)
             << "\" y2=\"" << n(y_of(0)) << "\" stroke=\"black\"/>\n";
        out_ << "<line x1=\"" << n(kLeft) << "\" y1=\"" << n(y_of(0)) << "\" x2=\"" << n(kLeft) << "\" y2=\""
             << n(y_of(1)) << "\" stroke=\"black\"/>\n";
    }

    static double y_of(double v) { return kTop + (1.0 - v) * (kHeight - kTop - kBottom); }
    static double plot_width() { return kWidth - kLeft - kRight; }
    static std::string n(double v) { return fmt("%.2f", v); }

    void text(double x, double y, const std::string& s, const char* anchor, int size) {
        out_ << "<text x=\"" << n(x) << "\" y=\"" << n(y) << "\" font-family=\"sans-serif\" font-size=\"" << size
             << "\" text-anchor=\"" << anchor << "\">" << escape(s) << "</text>\n";
    }
    void x_label(double x, const std::string& s) { text(x, kHeight - kBottom + 18, s, "middle", 11); }
    void polyline(const std::vector<std::pair<double, double>>& pts, const char* color) {
        out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
            out_ << (i ? " " : "") << n(pts[i].first) << "," << n(pts[i].second);
        out_ << "\"/>\n";
        for (const auto& [x, y] : pts)
            out_ << "<circle cx=\"" << n(x) << "\" cy=\"" << n(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    void bar(double x, double w, double v, const char* color) {
        out_ << "<rect x=\"" << n(x) << "\" y=\"" << n(y_of(v)) << "\" width=\"" << n(w) << "\" height=\""
             << n(y_of(0) - y_of(v)) << "\" fill=\"" << color << "\"/>\n";
    }
    void legend(std::size_t i, const std::string& label, const char* color) {
        const double x = kWidth - kRight + 14, y = kTop + 10 + 18.0 * static_cast<double>(i);
        out_ << "<rect x=\"" << n(x) << "\" y=\"" << n(y - 9) << "\" width=\"10\" height=\"10\" fill=\"" << color
             << "\"/>\n";
        text(x + 16, y, label, "start", 11);
    }
    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
            }
        }
        return out;
    }
    std::ostringstream out_;
};

std::string detection_svg(const SystemReport& s, const BreakdownTable& t, const std::vector<int>& ks) {
    SvgChart chart("Top-k detection rate by " + std::string(to_string(t.dimension)) + " (" + s.system + ", " +
                   std::string(to_string(s.rule)) + ")");
    const double step = ks.size() > 1 ? SvgChart::plot_width() / static_cast<double>(ks.size() - 1) : 0.0;
    auto x_of = [&](std::size_t i) {
        return ks.size() > 1 ? SvgChart::kLeft + step * static_cast<double>(i)
                             : SvgChart::kLeft + SvgChart::plot_width() / 2;
    };
    for (std::size_t i = 0; i < ks.size(); ++i)
        chart.x_label(x_of(i), "Top" + std::to_string(ks[i]));
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const char* color = kPalette[r % std::size(kPalette)];
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < t.rows[r].curve.points.size(); ++i)
            pts.emplace_back(x_of(i), SvgChart::y_of(t.rows[r].curve.points[i].rate));
        chart.polyline(pts, color);
        chart.legend(r, t.rows[r].stratum + " (n=" + std::to_string(t.rows[r].n_queries) + ")", color);
    }
    return chart.finish();
}

std::string recall_svg(const SystemReport& s, const BreakdownTable& t) {
    SvgChart chart(recall_label(t.totals.recall.depth) + " by " + std::string(to_string(t.dimension)) + " (" +
                   s.system + ", " + std::string(to_string(s.rule)) + ")");
    const double slot = SvgChart::plot_width() / static_cast<double>(std::max<std::size_t>(t.rows.size(), 1));
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const char* color = kPalette[r % std::size(kPalette)];
        const double x = SvgChart::kLeft + slot * static_cast<double>(r);
        chart.bar(x + slot * 0.15, slot * 0.7, t.rows[r].recall.value, color);
        chart.x_label(x + slot / 2, t.rows[r].stratum);
        chart.legend(r, t.rows[r].stratum + " (n=" + std::to_string(t.rows[r].n_queries) + ")", color);
    }
    return chart.finish();
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

void detection_rows(std::string& out, const std::string& dimension, const BreakdownRow& row) {
    for (const auto& p : row.curve.points)
        out += csv_field(dimension) + "," + csv_field(row.stratum) + "," + std::to_string(row.n_queries) + "," +
               std::to_string(p.k) + "," + format_number(p.rate) + "\n";
}

void recall_rows(std::string& out, const std::string& dimension, const BreakdownRow& row) {
    out += csv_field(dimension) + "," + csv_field(row.stratum) + "," + std::to_string(row.n_queries) + "," +
           format_number(row.recall.value) + "," + std::to_string(row.recall.depth) + "\n";
}

BreakdownRow overall_row(const SystemReport& s, std::size_t n_queries) {
    BreakdownRow row;
    row.stratum = "all";
    row.n_queries = n_queries;
    row.curve = s.curve;
    row.recall = s.recall;
    return row;
}

std::string comparison_csv(const ComparisonReport& c) {
    std::string out = std::string(kComparisonHeader) + "\n";
    const std::string system = c.system_a + " - " + c.system_b;
    for (const auto& r : c.rows) {
        out += csv_field(r.dimension) + "," + csv_field(r.stratum) + "," + std::to_string(r.n_queries) + "," +
               r.metric + "," + format_number(r.value_a) + "," + format_number(r.value_b) + "," +
               csv_field(system) + "," + format_number(r.delta) + ",";
        if (r.significance)
            out += format_number(r.significance->p_value) + "," + format_number(r.significance->ci_low) + "," +
                   format_number(r.significance->ci_high);
        else
            out += ",,";
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text
// ---------------------------------------------------------------------------

std::string cross_language_text(const SystemReport& s) {
    std::vector<std::string> cols;
    std::vector<std::string> rows;
    for (const auto& c : s.cross_language) {
        if (std::find(rows.begin(), rows.end(), c.query_language) == rows.end())
            rows.push_back(c.query_language);
        if (std::find(cols.begin(), cols.end(), c.relevant_language) == cols.end())
            cols.push_back(c.relevant_language);
    }
    std::vector<std::vector<std::string>> table;
    std::vector<std::string> header{"query \\ relevant"};
    header.insert(header.end(), cols.begin(), cols.end());
    table.push_back(header);
    for (const auto& r : rows) {
        std::vector<std::string> line{r};
        for (const auto& c : s.cross_language)
            if (c.query_language == r)
                line.push_back(c.recall ? fmt("%.2f", *c.recall) + " (" + std::to_string(c.n_retrieved) + "/" +
                                              std::to_string(c.n_pairs) + ")"
                                        : "- (0/0)");
        table.push_back(line);
    }
    return layout(table);
}

std::string comparison_text(const ComparisonReport& c, const MetricsReport& report) {
    std::string out = "Comparison: " + c.system_a + " vs " + c.system_b + " (match rule: " +
                      std::string(to_string(c.rule)) + ")\n";
    const SignificanceResult* any = nullptr;
    for (const auto& r : c.rows)
        if (r.significance) {
            any = &*r.significance;
            break;
        }
    if (any)
        out += "Paired bootstrap: " + std::to_string(any->n_resamples) + " resamples, strata " + any->strata_spec +
               ", seed " + std::to_string(any->seed) + "\n";
    std::vector<std::vector<std::string>> table{{"Metric", c.system_a, c.system_b, "Delta", "p-value", "95% CI"}};
    for (const auto& r : c.rows) {
        if (r.dimension != "overall")
            continue;
        const bool is_recall = r.metric == "recall";
        const std::string name = is_recall ? recall_label(report.recall_depth) : "Top" + r.metric.substr(3);
        std::vector<std::string> line{name};
        if (is_recall) {
            line.push_back(fmt("%.2f", r.value_a));
            line.push_back(fmt("%.2f", r.value_b));
            line.push_back(fmt("%+.2f", r.delta));
        } else {
            line.push_back(format_percent(r.value_a));
            line.push_back(format_percent(r.value_b));
            line.push_back(format_pp(r.delta));
        }
        if (r.significance) {
            line.push_back(fmt("%.4f", r.significance->p_value));
            line.push_back("[" + fmt("%+.3f", r.significance->ci_low) + ", " + fmt("%+.3f", r.significance->ci_high) +
                           "]");
        }
        table.push_back(line);
    }
    out += layout(table);

    std::string current;
    std::vector<std::vector<std::string>> strata;
    auto flush = [&] {
        if (!strata.empty())
            out += "\nDeltas by " + current + "\n" + layout(strata);
        strata.clear();
    };
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
        const auto& r = c.rows[i];
        if (r.dimension == "overall")
            continue;
        if (r.dimension != current) {
            flush();
            current = r.dimension;
            std::vector<std::string> h{"Stratum", "Queries"};
            for (int k : report.ks)
                h.push_back("Top" + std::to_string(k));
            h.push_back(recall_label(report.recall_depth));
            strata.push_back(h);
        }
        if (r.metric.starts_with("top")) {
            if (strata.size() == 1 || strata.back().size() == report.ks.size() + 3)
                strata.push_back({r.stratum, std::to_string(r.n_queries)});
            strata.back().push_back(format_pp(r.delta));
        } else {
            strata.back().push_back(fmt("%+.2f", r.delta));
        }
    }
    flush();
    for (const auto& w : c.warnings)
        out += "warning: " + w + "\n";
    return out;
}

} // namespace

ReportFormat parse_report_format(std::string_view s) {
    if (s == "table-text" || s == "text")
        return ReportFormat::TableText;
    if (s == "csv")
        return ReportFormat::Csv;
    if (s == "svg" || s == "svg-plot-data")
        return ReportFormat::Svg;
    throw std::invalid_argument("unknown report format '" + std::string(s) + "'");
}

std::vector<ReportFormat> all_report_formats() {
    return {ReportFormat::TableText, ReportFormat::Csv, ReportFormat::Svg};
}

std::string format_percent(double rate) {
    const double pct = rate * 100.0;
    if (std::abs(pct - std::round(pct)) < 1e-9)
        return fmt("%.0f%%", std::round(pct));
    return fmt("%.1f%%", pct);
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string render_table(const MetricsReport& report) {
    std::string out = "Evaluation report\n";
    out += "dataset: " + report.dataset_hash + "\n";
    out += "queries: " + std::to_string(report.n_queries) + "\n";
    out += "seed: " + std::to_string(report.seed) + "\n";
    out += "recall: " + std::string(to_string(report.averaging)) + "-averaged over the top " +
           std::to_string(report.recall_depth) + " results\n";
    for (const auto& n : report.notes)
        out += "note: " + n + "\n";

    if (!report.systems.empty()) {
        out += "\nOverall\n";
        std::vector<std::vector<std::string>> table{curve_header(report.ks, "System", report.recall_depth, false)};
        for (const auto& s : report.systems)
            table.push_back(curve_cells(s.system + " (" + std::string(to_string(s.rule)) + ")", s.curve, s.recall,
                                        std::nullopt));
        out += layout(table);
    }

    for (const auto& s : report.systems) {
        for (const auto& t : s.breakdowns) {
            out += "\nBy " + std::string(to_string(t.dimension)) + ": " + s.system + " (" +
                   std::string(to_string(s.rule)) + ")\n";
            std::vector<std::vector<std::string>> table{
                curve_header(report.ks, "Stratum", t.totals.recall.depth, true)};
            for (const auto& r : t.rows)
                table.push_back(curve_cells(r.stratum, r.curve, r.recall, r.n_queries));
            table.push_back(curve_cells("Total", t.totals.curve, t.totals.recall, t.totals.n_queries));
            out += layout(table);
            for (const auto& n : t.notes)
                out += "note: " + n + "\n";
        }
        if (!s.cross_language.empty()) {
            out += "\nCross-language recall: " + s.system + " (" + std::string(to_string(s.rule)) +
                   "), rows are query languages\n";
            out += cross_language_text(s);
        }
    }
    for (const auto& c : report.comparisons)
        out += "\n" + comparison_text(c, report);
    return out;
}

std::vector<std::pair<std::string, std::string>> render_report(const MetricsReport& report,
                                                               const std::vector<ReportFormat>& formats) {
    auto wants = [&](ReportFormat f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };
    std::vector<std::pair<std::string, std::string>> files;

    if (wants(ReportFormat::TableText))
        files.emplace_back("report.txt", render_table(report));

    std::set<std::string> names;
    for (const auto& s : report.systems)
        names.insert(s.system);
    const bool prefix = names.size() > 1;

    if (wants(ReportFormat::Csv)) {
        if (report.systems.empty()) {
            files.emplace_back("detection.csv", std::string(kDetectionHeader) + "\n");
            files.emplace_back("recall.csv", std::string(kRecallHeader) + "\n");
        }
        for (const auto& s : report.systems) {
            const std::string pre = prefix ? safe_name(s.system) + "_" : "";
            const std::string suf = rule_suffix(s.rule);
            std::string det = std::string(kDetectionHeader) + "\n";
            std::string rec = std::string(kRecallHeader) + "\n";
            if (!s.curve.points.empty()) {
                const auto row = overall_row(s, report.n_queries);
                detection_rows(det, "overall", row);
                recall_rows(rec, "overall", row);
            }
            files.emplace_back(pre + "detection" + suf + ".csv", det);
            files.emplace_back(pre + "recall" + suf + ".csv", rec);
            for (const auto& t : s.breakdowns) {
                const std::string dim(to_string(t.dimension));
                std::string bd = std::string(kDetectionHeader) + "\n";
                std::string br = std::string(kRecallHeader) + "\n";
                for (const auto& r : t.rows) {
                    detection_rows(bd, dim, r);
                    recall_rows(br, dim, r);
                }
                files.emplace_back(pre + "breakdown_" + dim + suf + ".csv", bd);
                files.emplace_back(pre + "recall_" + dim + suf + ".csv", br);
            }
            if (!s.cross_language.empty()) {
                std::string cl = std::string(kCrossHeader) + "\n";
                for (const auto& c : s.cross_language)
                    cl += csv_field(c.query_language) + "," + csv_field(c.relevant_language) + "," +
                          std::to_string(c.n_pairs) + "," + std::to_string(c.n_retrieved) + "," +
                          (c.recall ? format_number(*c.recall) : "") + "\n";
                files.emplace_back(pre + "cross_language" + suf + ".csv", cl);
            }
        }
        for (const auto& c : report.comparisons)
            files.emplace_back("comparison" + rule_suffix(c.rule) + ".csv", comparison_csv(c));
    }

    if (wants(ReportFormat::Svg)) {
        for (const auto& s : report.systems) {
            const std::string pre = prefix ? safe_name(s.system) + "_" : "";
            const std::string suf = rule_suffix(s.rule);
            for (const auto& t : s.breakdowns) {
                if (t.rows.empty())
                    continue;
                const std::string dim(to_string(t.dimension));
                files.emplace_back(pre + "detection_rate_" + dim + suf + ".svg", detection_svg(s, t, report.ks));
                files.emplace_back(pre + "recall_" + dim + suf + ".svg", recall_svg(s, t));
            }
        }
    }
    return files;
}

std::vector<fs::path> emit_report(const MetricsReport& report, const fs::path& out_dir,
                                  const std::vector<ReportFormat>& formats) {
    const auto files = render_report(report, formats);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw IoError("cannot create output directory " + out_dir.string());
    const auto probe = out_dir / ".nsbench-write-probe";
    {
        std::ofstream p(probe);
        if (!p || !(p << "probe") || !p.flush())
            throw IoError("output directory " + out_dir.string() + " is not writable");
    }
    fs::remove(probe, ec);

    std::vector<fs::path> written;
    for (const auto& [name, content] : files) {
        const auto path = out_dir / name;
        std::ofstream out(path, std::ios::binary);
        out << content;
        if (!out)
            throw IoError("failed writing " + path.string());
        written.push_back(path);
    }
    return written;
}

} // namespace nsbench
