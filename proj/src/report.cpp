#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "playlab/experiment.hpp"

namespace playlab {

namespace {

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[40];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

struct SeriesPoint {
    double x, mean, stddev;
};

struct Series {
    std::string label;
    std::vector<SeriesPoint> points;
};

const char* kPalette[] = {"#4878a8", "#e07b39", "#3f9b6e", "#c34a4a", "#8064a2", "#7f7f3f"};

// Minimal standalone line plot with a +-1 std band per series.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<Series>& series) {
    const double width = 680, height = 440;
    const double ml = 64, mr = 150, mt = 36, mb = 48;
    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    for (const auto& s : series)
        for (const auto& p : s.points) {
            x_min = std::min(x_min, p.x);
            x_max = std::max(x_max, p.x);
            y_min = std::min(y_min, p.mean - p.stddev);
            y_max = std::max(y_max, p.mean + p.stddev);
        }
    if (x_min > x_max) return;
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr); };
    auto sy = [&](double y) { return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb); };

    std::ofstream out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" "
           "font-family=\"sans-serif\">" << title << "</text>\n";

    // Axes and ticks.
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double xv = x_min + (x_max - x_min) * t / 5.0;
        const double yv = y_min + (y_max - y_min) * t / 5.0;
        out << "<line x1=\"" << sx(xv) << "\" y1=\"" << height - mb << "\" x2=\"" << sx(xv)
            << "\" y2=\"" << height - mb + 4 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << sx(xv) << "\" y=\"" << height - mb + 18
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
            << fmt(xv, "%g") << "</text>\n";
        out << "<line x1=\"" << ml - 4 << "\" y1=\"" << sy(yv) << "\" x2=\"" << ml << "\" y2=\""
            << sy(yv) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << sy(yv) + 4
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
            << fmt(yv, "%.3g") << "</text>\n";
    }
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 10
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 16 " << (mt + height - mb) / 2 << ")\">" << y_label
        << "</text>\n";

    for (size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % 6];
        // +-1 std band (zero-width for a single seed).
        std::ostringstream band;
        for (const auto& p : series[s].points) band << sx(p.x) << "," << sy(p.mean + p.stddev) << " ";
        for (auto it = series[s].points.rbegin(); it != series[s].points.rend(); ++it)
            band << sx(it->x) << "," << sy(it->mean - it->stddev) << " ";
        out << "<polygon points=\"" << band.str() << "\" fill=\"" << color
            << "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";

        std::ostringstream line;
        for (const auto& p : series[s].points) line << sx(p.x) << "," << sy(p.mean) << " ";
        out << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.6\"/>\n";
        for (const auto& p : series[s].points)
            out << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.mean) << "\" r=\"2.4\" fill=\""
                << color << "\"/>\n";

        const double ly = mt + 16.0 * static_cast<double>(s);
        out << "<line x1=\"" << width - mr + 10 << "\" y1=\"" << ly << "\" x2=\""
            << width - mr + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - mr + 40 << "\" y=\"" << ly + 4
            << "\" font-size=\"11\" font-family=\"sans-serif\">" << series[s].label << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace

bool emit_report(const std::string& run_dir) {
    const std::string csv_path = run_dir + "/report.csv";
    std::vector<ReportRow> rows;
    try {
        rows = read_report_csv(csv_path);
    } catch (const std::exception&) {
        std::cerr << "emit_report: no report.csv under " << run_dir << "\n";
        return false;
    }
    if (rows.empty()) {
        std::cerr << "emit_report: " << csv_path << " holds no data rows\n";
        return false;
    }

    int final_window = 10;
    const std::string meta_path = run_dir + "/metadata.txt";
    if (std::filesystem::exists(meta_path)) {
        const ConfigMap meta = ConfigMap::parse_file(meta_path);
        final_window = static_cast<int>(meta.get_int("experiment", "final_window", final_window));
    }

    const std::vector<MetricSummary> summary = summarize_rows(rows, final_window);
    {
        std::ofstream out(run_dir + "/summary.txt");
        out << "# final-window mean +- std across seeds (window = last " << final_window
            << " evaluations)\n";
        out << "# metric latent_dim n_seeds mean std\n";
        for (const auto& s : summary)
            out << s.metric << " " << s.latent_dim << " " << s.n_seeds << " " << fmt(s.mean) << " "
                << fmt(s.stddev) << "\n";
    }

    // metric -> latent -> step -> seed values.
    std::map<std::string, std::map<int, std::map<int64_t, std::vector<double>>>> grouped;
    for (const auto& row : rows) grouped[row.metric][row.latent_dim][row.step].push_back(row.value);

    const std::string plot_dir = run_dir + "/plots";
    std::filesystem::create_directories(plot_dir);
    std::set<int> latents;
    for (const auto& row : rows) latents.insert(row.latent_dim);

    for (const auto& [metric, by_latent] : grouped) {
        std::vector<Series> series;
        for (const auto& [latent, by_step] : by_latent) {
            Series s;
            s.label = "latent " + std::to_string(latent);
            for (const auto& [step, values] : by_step) {
                double mean = 0.0;
                for (const double v : values) mean += v;
                mean /= static_cast<double>(values.size());
                double var = 0.0;
                for (const double v : values) var += (v - mean) * (v - mean);
                s.points.push_back(
                    {static_cast<double>(step), mean,
                     std::sqrt(var / static_cast<double>(values.size()))});
            }
            series.push_back(std::move(s));
        }
        write_svg_plot(plot_dir + "/" + metric + "_vs_step.svg", metric + " over training",
                       "training step", metric, series);
    }

    if (latents.size() > 1) {
        for (const auto& [metric, by_latent] : grouped) {
            (void)by_latent;
            Series s;
            s.label = "final window";
            for (const auto& ms : summary)
                if (ms.metric == metric)
                    s.points.push_back({static_cast<double>(ms.latent_dim), ms.mean, ms.stddev});
            std::sort(s.points.begin(), s.points.end(),
                      [](const SeriesPoint& a, const SeriesPoint& b) { return a.x < b.x; });
            write_svg_plot(plot_dir + "/" + metric + "_vs_latent.svg",
                           metric + " vs latent dimension", "latent dimension", metric, {s});
        }
    }
    return true;
}

} // namespace playlab
