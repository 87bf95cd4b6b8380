#ifndef AGASIM_HEATMAP_HPP
#define AGASIM_HEATMAP_HPP

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "agasim/sweep.hpp"

namespace agasim {

class UnknownMetricError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Metric ids accepted by the renderer; they match the CSV column names.
inline constexpr std::array<std::string_view, 8> kHeatmapMetrics = {
    "voe_km2_s2",     "turn_angle_deg", "tof_band_s",      "actual_peri_alt_km",
    "actual_psi_deg", "delta_v_km_s",   "voe_contrib_pct", "delta_contrib_pct",
};

/// Value plotted for a cell; empty when the cell is not Ok or the value is undefined.
std::optional<double> metric_value(const SweepCell& cell, std::string_view metric);

/// Rainbow map: t in [0, 1] maps to HSV hue 270 deg (violet) down to 0 deg
/// (red) at full saturation and value. Returns "#rrggbb".
std::string rainbow_color(double t);

/// One SVG for the cells of `table` with the given psi and kind. Colors are
/// normalized linearly between the min and max of the defined values.
std::string render_heatmap_svg(const SweepTable& table, std::string_view metric, double psi_deg, ManeuverKind kind);

/// heatmap_<metric>_<psi>_<kind>.svg
std::string heatmap_filename(std::string_view metric, double psi_deg, ManeuverKind kind);

/// Writes one SVG per (psi, kind) present in the table; returns the paths.
std::vector<std::filesystem::path> render_heatmap(const SweepTable& table, std::string_view metric,
                                                  const std::filesystem::path& out_dir);

} // namespace agasim

#endif
