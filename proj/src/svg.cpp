#include "topolens/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "topolens/pipeline_global.hpp"
#include "topolens/rng.hpp"

namespace topolens {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::ofstream open_svg(const std::filesystem::path& path, int width, int height) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(DataError::Code::missing_file, "cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return out;
}

struct Range {
    double lo = 0.0, hi = 1.0;
    double span() const { return hi > lo ? hi - lo : 1.0; }
};

Range range_of(const std::vector<double>& v) {
    Range r{v.empty() ? 0.0 : v[0], v.empty() ? 1.0 : v[0]};
    for (const double x : v) {
        r.lo = std::min(r.lo, x);
        r.hi = std::max(r.hi, x);
    }
    return r;
}

} // namespace

void svg_barcode(const std::filesystem::path& path, const Barcode& barcode) {
    const int width = 640, height = 420;
    const double margin = 40.0;
    double max_x = barcode.threshold;
    for (const auto& iv : barcode.intervals) {
        if (iv.finite()) max_x = std::max(max_x, iv.death);
    }
    if (max_x <= 0.0) max_x = 1.0;
    const double x_scale = (width - 2 * margin) / max_x;

    auto out = open_svg(path, width, height);
    const std::size_t rows = barcode.intervals.size();
    const double row_h = std::min(12.0, (height - 2 * margin) / std::max<std::size_t>(rows, 1));
    std::size_t row = 0;
    for (int dim = 0; dim <= 1; ++dim) {
        for (const auto& iv : barcode.intervals) {
            if (iv.dim != dim) continue;
            const double y = margin + static_cast<double>(row) * row_h;
            const double x0 = margin + iv.birth * x_scale;
            const double x1 = margin + (iv.finite() ? iv.death : max_x) * x_scale;
            out << "<line x1=\"" << x0 << "\" y1=\"" << y << "\" x2=\"" << x1 << "\" y2=\"" << y
                << "\" stroke=\"" << kPalette[dim] << "\" stroke-width=\""
                << std::max(1.0, row_h - 3.0) << "\"";
            if (!iv.finite()) out << " stroke-dasharray=\"4 3\"";
            out << "/>\n";
            ++row;
        }
    }
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 10
        << "\" font-size=\"12\" text-anchor=\"middle\">filtration value (max " << max_x
        << ")</text>\n";
    out << "</svg>\n";
}

void svg_line_chart(const std::filesystem::path& path, const std::string& title,
                    const std::vector<double>& x, const std::vector<SvgSeries>& series) {
    const int width = 720, height = 440;
    const double margin = 56.0;
    Range xr = range_of(x);
    Range yr{0.0, 1.0};
    bool first = true;
    for (const auto& s : series) {
        for (const double v : s.values) {
            if (!std::isfinite(v)) continue;
            if (first) {
                yr = {v, v};
                first = false;
            }
            yr.lo = std::min(yr.lo, v);
            yr.hi = std::max(yr.hi, v);
        }
    }

    auto out = open_svg(path, width, height);
    const auto px = [&](double v) { return margin + (v - xr.lo) / xr.span() * (width - 2 * margin); };
    const auto py = [&](double v) {
        return height - margin - (v - yr.lo) / yr.span() * (height - 2 * margin);
    };

    out << "<text x=\"" << width / 2 << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">"
        << title << "</text>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % 8];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < x.size() && i < series[s].values.size(); ++i) {
            const double v = series[s].values[i];
            if (!std::isfinite(v)) continue;
            out << px(x[i]) << ',' << py(v) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << width - margin + 4 << "\" y=\"" << margin + 16.0 * s
            << "\" font-size=\"11\" fill=\"" << color << "\">" << series[s].name << "</text>\n";
    }
    out << "</svg>\n";
}

void svg_scatter(const std::filesystem::path& path, const GlobalReport& report) {
    const int width = 560, height = 520;
    const double margin = 50.0;
    const std::size_t k = report.pca.n_components;
    std::vector<double> xs(report.table.size()), ys(report.table.size(), 0.0);
    for (std::size_t i = 0; i < report.table.size(); ++i) {
        xs[i] = report.pca.scores[i * k];
        if (k > 1) ys[i] = report.pca.scores[i * k + 1];
    }
    const Range xr = range_of(xs), yr = range_of(ys);

    auto out = open_svg(path, width, height);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double px = margin + (xs[i] - xr.lo) / xr.span() * (width - 2 * margin);
        const double py = height - margin - (ys[i] - yr.lo) / yr.span() * (height - 2 * margin);
        const bool adv = report.table.labels[i] == 1;
        out << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"3.5\" fill=\""
            << (adv ? kPalette[1] : kPalette[0]) << "\" fill-opacity=\"0.75\"/>\n";
    }
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
        << "\" font-size=\"12\" text-anchor=\"middle\">pc1</text>\n";
    out << "<text x=\"14\" y=\"" << height / 2 << "\" font-size=\"12\">pc2</text>\n";
    out << "</svg>\n";
}

void svg_beeswarm(const std::filesystem::path& path, const GlobalReport& report) {
    const std::size_t p = report.prune.kept.size();
    const std::size_t m = report.table.size();
    const int width = 720;
    const int height = static_cast<int>(80 + 36 * p);
    const double margin = 170.0;

    std::vector<double> all;
    all.reserve(m * p);
    for (const double a : report.shap.attributions) all.push_back(a);
    Range xr = range_of(all);

    auto out = open_svg(path, width, height);
    Rng jitter(9);
    for (std::size_t lane = 0; lane < p; ++lane) {
        const std::size_t j = report.shap.importance_order[lane];
        const double y0 = 50.0 + 36.0 * static_cast<double>(lane);
        out << "<text x=\"8\" y=\"" << y0 + 4 << "\" font-size=\"11\">"
            << report.prune.kept_names[j] << "</text>\n";
        std::vector<double> col(m);
        for (std::size_t i = 0; i < m; ++i) col[i] = report.table.rows[i].values[report.prune.kept[j]];
        const Range vr = range_of(col);
        for (std::size_t i = 0; i < m; ++i) {
            const double a = report.shap.attributions[i * p + j];
            const double px = margin + (a - xr.lo) / xr.span() * (width - margin - 30);
            const double py = y0 + (jitter.uniform() - 0.5) * 22.0;
            const double t = (col[i] - vr.lo) / vr.span();
            const int red = static_cast<int>(40 + 200 * t);
            const int blue = static_cast<int>(240 - 200 * t);
            out << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"2.6\" fill=\"rgb(" << red
                << ",60," << blue << ")\" fill-opacity=\"0.8\"/>\n";
        }
    }
    const double zero_x = margin + (0.0 - xr.lo) / xr.span() * (width - margin - 30);
    out << "<line x1=\"" << zero_x << "\" y1=\"30\" x2=\"" << zero_x << "\" y2=\"" << height - 30
        << "\" stroke=\"#999\" stroke-dasharray=\"3 3\"/>\n";
    out << "<text x=\"" << (margin + width - 30) / 2 << "\" y=\"" << height - 8
        << "\" font-size=\"12\" text-anchor=\"middle\">attribution (logit)</text>\n";
    out << "</svg>\n";
}

} // namespace topolens
