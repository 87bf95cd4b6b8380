#include "agasim/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "agasim/csv.hpp"

namespace agasim {

namespace {

constexpr double kCellW = 14.0;
constexpr double kCellH = 10.0;
constexpr double kLeft = 80.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;
constexpr double kBarGap = 30.0;
constexpr double kBarW = 20.0;
constexpr double kRight = 110.0;
constexpr int kBarSteps = 64;

void require_metric(std::string_view metric)
{
    if (std::find(kHeatmapMetrics.begin(), kHeatmapMetrics.end(), metric) == kHeatmapMetrics.end()) {
        std::string known;
        for (auto m : kHeatmapMetrics) {
            known += (known.empty() ? "" : ", ") + std::string(m);
        }
        throw UnknownMetricError("unknown heatmap metric '" + std::string(metric) + "'; known: " + known);
    }
}

std::optional<double> finite(double v)
{
    if (!std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::vector<double> sorted_unique(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::string label(double v) { return fmt::format("{:.6g}", v); }

} // namespace

std::optional<double> metric_value(const SweepCell& cell, std::string_view metric)
{
    require_metric(metric);
    const TrajectoryResult& r = cell.result;
    if (r.status != Status::ok) {
        return std::nullopt;
    }
    if (metric == "voe_km2_s2") return finite(r.voe_km2_s2);
    if (metric == "turn_angle_deg") return finite(r.turn_angle_deg);
    if (metric == "tof_band_s") return finite(r.tof_band_s);
    if (metric == "actual_peri_alt_km") return finite(r.actual_pericenter_altitude_km);
    if (metric == "actual_psi_deg") return finite(r.actual_approach_angle_deg);
    if (metric == "delta_v_km_s") return finite(r.delta_v_km_s);
    if (metric == "voe_contrib_pct") return cell.contribution.voe_pct;
    return cell.contribution.delta_pct;
}

std::string rainbow_color(double t)
{
    t = std::clamp(t, 0.0, 1.0);
    const double hue = 270.0 * (1.0 - t);
    const double sector = hue / 60.0;
    const double x = 1.0 - std::abs(std::fmod(sector, 2.0) - 1.0);
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
    if (sector < 1.0) {
        r = 1.0, g = x;
    } else if (sector < 2.0) {
        r = x, g = 1.0;
    } else if (sector < 3.0) {
        g = 1.0, b = x;
    } else if (sector < 4.0) {
        g = x, b = 1.0;
    } else {
        r = x, b = 1.0;
    }
    auto byte = [](double c) { return static_cast<int>(std::lround(c * 255.0)); };
    return fmt::format("#{:02x}{:02x}{:02x}", byte(r), byte(g), byte(b));
}

std::string heatmap_filename(std::string_view metric, double psi_deg, ManeuverKind kind)
{
    return fmt::format("heatmap_{}_{:g}_{}.svg", metric, psi_deg, to_string(kind));
}

std::string render_heatmap_svg(const SweepTable& table, std::string_view metric, double psi_deg, ManeuverKind kind)
{
    require_metric(metric);
    std::vector<const SweepCell*> cells;
    std::vector<double> xs;
    std::vector<double> ys;
    for (const SweepCell& c : table.cells) {
        if (c.psi_deg == psi_deg && c.kind == kind) {
            cells.push_back(&c);
            xs.push_back(c.altitude_km);
            ys.push_back(c.signed_ld);
        }
    }
    if (cells.empty()) {
        throw std::invalid_argument(fmt::format("no cells for psi = {:g}, kind = {}", psi_deg, to_string(kind)));
    }
    xs = sorted_unique(std::move(xs));
    ys = sorted_unique(std::move(ys));

    std::optional<double> lo;
    std::optional<double> hi;
    for (const SweepCell* c : cells) {
        if (auto v = metric_value(*c, metric)) {
            lo = lo ? std::min(*lo, *v) : *v;
            hi = hi ? std::max(*hi, *v) : *v;
        }
    }

    const double plot_w = kCellW * static_cast<double>(xs.size());
    const double plot_h = kCellH * static_cast<double>(ys.size());
    const double width = kLeft + plot_w + kBarGap + kBarW + kRight;
    const double height = kTop + plot_h + kBottom;

    std::string svg;
    svg += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.1f}\" height=\"{:.1f}\" viewBox=\"0 0 {:.1f} {:.1f}\" "
        "font-family=\"sans-serif\" font-size=\"11\">\n",
        width, height, width, height);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"20\" font-size=\"13\">{} {} psi={:g} deg: {}</text>\n", kLeft,
                       table.planet, to_string(kind), psi_deg, metric);

    for (const SweepCell* c : cells) {
        const auto ix = static_cast<double>(std::lower_bound(xs.begin(), xs.end(), c->altitude_km) - xs.begin());
        const auto iy = static_cast<double>(std::lower_bound(ys.begin(), ys.end(), c->signed_ld) - ys.begin());
        std::string fill = "#ffffff";
        if (auto v = metric_value(*c, metric)) {
            fill = rainbow_color(*hi > *lo ? (*v - *lo) / (*hi - *lo) : 0.0);
        }
        const double x = kLeft + ix * kCellW;
        const double y = kTop + plot_h - (iy + 1.0) * kCellH;
        svg += fmt::format(
            "<rect class=\"cell\" x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"{}\"/>\n", x, y,
            kCellW, kCellH, fill);
    }
    svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
                       "stroke=\"#000000\"/>\n",
                       kLeft, kTop, plot_w, plot_h);

    const std::size_t xstride = std::max<std::size_t>(1, xs.size() / 8);
    for (std::size_t i = 0; i < xs.size(); i += xstride) {
        const double x = kLeft + (static_cast<double>(i) + 0.5) * kCellW;
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", x,
                           kTop + plot_h + 15.0, label(xs[i]));
    }
    const std::size_t ystride = std::max<std::size_t>(1, ys.size() / 8);
    for (std::size_t i = 0; i < ys.size(); i += ystride) {
        const double y = kTop + plot_h - (static_cast<double>(i) + 0.5) * kCellH + 4.0;
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", kLeft - 5.0, y,
                           label(ys[i]));
    }
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">projected pericenter altitude "
                       "(km)</text>\n",
                       kLeft + plot_w / 2.0, kTop + plot_h + 35.0);
    svg += fmt::format("<text x=\"15\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 15 {:.1f})\">"
                       "signed L/D</text>\n",
                       kTop + plot_h / 2.0, kTop + plot_h / 2.0);

    const double bar_x = kLeft + plot_w + kBarGap;
    const double step_h = plot_h / kBarSteps;
    for (int i = 0; i < kBarSteps; ++i) {
        const double t = (i + 0.5) / kBarSteps;
        const double y = kTop + plot_h - (i + 1) * step_h;
        svg += fmt::format("<rect class=\"bar\" x=\"{:.1f}\" y=\"{:.3f}\" width=\"{:.1f}\" height=\"{:.3f}\" "
                           "fill=\"{}\"/>\n",
                           bar_x, y, kBarW, step_h, rainbow_color(t));
    }
    const std::string max_label = hi ? label(*hi) : "n/a";
    const std::string min_label = lo ? label(*lo) : "n/a";
    svg += fmt::format("<text class=\"bar-max\" x=\"{:.1f}\" y=\"{:.1f}\">max {}</text>\n", bar_x + kBarW + 5.0,
                       kTop + 8.0, max_label);
    svg += fmt::format("<text class=\"bar-min\" x=\"{:.1f}\" y=\"{:.1f}\">min {}</text>\n", bar_x + kBarW + 5.0,
                       kTop + plot_h, min_label);
    svg += "</svg>\n";
    return svg;
}

std::vector<std::filesystem::path> render_heatmap(const SweepTable& table, std::string_view metric,
                                                  const std::filesystem::path& out_dir)
{
    require_metric(metric);
    std::vector<std::pair<double, ManeuverKind>> figures;
    for (const SweepCell& c : table.cells) {
        const std::pair<double, ManeuverKind> key{c.psi_deg, c.kind};
        if (std::find(figures.begin(), figures.end(), key) == figures.end()) {
            figures.push_back(key);
        }
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw ExportError("cannot create directory '" + out_dir.string() + "': " + ec.message());
    }
    std::vector<std::filesystem::path> paths;
    for (const auto& [psi, kind] : figures) {
        const auto path = out_dir / heatmap_filename(metric, psi, kind);
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw ExportError("cannot open '" + path.string() + "' for writing");
        }
        out << render_heatmap_svg(table, metric, psi, kind);
        if (!out) {
            throw ExportError("write to '" + path.string() + "' failed");
        }
        paths.push_back(path);
    }
    return paths;
}

} // namespace agasim
