#ifndef AGASIM_SWEEP_HPP
#define AGASIM_SWEEP_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "agasim/config.hpp"
#include "agasim/maneuver.hpp"

namespace agasim {

struct SweepCell {
    ManeuverKind kind = ManeuverKind::agam;
    double psi_deg = 0.0;
    double altitude_km = 0.0;
    double signed_ld = 0.0;
    TrajectoryResult result;
    Contribution contribution;
};

/// GAM reference trajectory shared by every cell at one (altitude, psi).
struct BaselineCell {
    double psi_deg = 0.0;
    double altitude_km = 0.0;
    TrajectoryResult result;
};

struct SweepTable {
    std::string planet;
    /// Ordered by altitude, then signed L/D, then psi_list order, then kinds order.
    std::vector<SweepCell> cells;
    /// Ordered by altitude, then psi_list order.
    std::vector<BaselineCell> baselines;

    const BaselineCell* baseline(double altitude_km, double psi_deg) const;
};

/// Calls fn(i) for i in [0, n) on up to `workers` threads. The first exception
/// thrown by any call is rethrown after all threads join.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

/// Configuration of one grid point.
ManeuverConfig cell_config(const SweepGrid& grid, ManeuverKind kind, double psi_deg, double altitude_km,
                           double signed_ld);

/// Like run_maneuver, but any failure becomes a step_failure result.
TrajectoryResult run_cell(const ManeuverConfig& config);

SweepTable run_sweep(const SweepGrid& grid);

/// Per (psi, kind) summary of the min-L/D edge of the map.
struct SweepHighlight {
    double psi_deg = 0.0;
    ManeuverKind kind = ManeuverKind::agam;
    double min_ld = 0.0;
    /// Lowest altitude whose min-L/D cell is Ok.
    std::optional<double> lowest_ok_altitude_km;
    std::optional<double> turn_angle_gain_deg;  // cell minus GAM baseline
    std::optional<double> voe_gain_km2_s2;      // cell minus GAM baseline
    std::optional<double> max_tof_band_s;       // over Ok cells of the map
};

std::vector<SweepHighlight> sweep_highlights(const SweepGrid& grid, const SweepTable& table);

} // namespace agasim

#endif
