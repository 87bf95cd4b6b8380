#include "agasim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace agasim {

const BaselineCell* SweepTable::baseline(double altitude_km, double psi_deg) const
{
    for (const auto& b : baselines) {
        if (b.altitude_km == altitude_km && b.psi_deg == psi_deg) {
            return &b;
        }
    }
    return nullptr;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn)
{
    const std::size_t width = std::min<std::size_t>(std::max(1u, workers), n);
    if (width <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(width);
        for (std::size_t w = 0; w < width; ++w) {
            pool.emplace_back(work);
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

ManeuverConfig cell_config(const SweepGrid& grid, ManeuverKind kind, double psi_deg, double altitude_km,
                           double signed_ld)
{
    ManeuverConfig c = grid.base;
    c.kind = kind;
    c.psi_deg = psi_deg;
    c.pericenter_altitude_km = altitude_km;
    c.signed_ld = kind == ManeuverKind::gam ? 0.0 : signed_ld;
    return c;
}

TrajectoryResult run_cell(const ManeuverConfig& config)
{
    try {
        return run_maneuver(config);
    } catch (const std::exception& e) {
        TrajectoryResult r;
        r.status = Status::step_failure;
        r.message = e.what();
        return r;
    }
}

SweepTable run_sweep(const SweepGrid& grid)
{
    grid.validate();
    const std::vector<double> altitudes = grid.altitudes();

    SweepTable table;
    table.planet = grid.base.planet.name;
    for (double h : altitudes) {
        for (double psi : grid.psi_list) {
            table.baselines.push_back({psi, h, {}});
        }
        for (double ld : grid.ld_values) {
            for (double psi : grid.psi_list) {
                for (ManeuverKind k : grid.kinds) {
                    SweepCell cell;
                    cell.kind = k;
                    cell.psi_deg = psi;
                    cell.altitude_km = h;
                    cell.signed_ld = ld;
                    table.cells.push_back(std::move(cell));
                }
            }
        }
    }

    const std::size_t nb = table.baselines.size();
    parallel_for(nb + table.cells.size(), grid.workers, [&](std::size_t i) {
        if (i < nb) {
            BaselineCell& b = table.baselines[i];
            b.result = run_cell(cell_config(grid, ManeuverKind::gam, b.psi_deg, b.altitude_km, 0.0));
        } else {
            SweepCell& c = table.cells[i - nb];
            c.result = run_cell(cell_config(grid, c.kind, c.psi_deg, c.altitude_km, c.signed_ld));
        }
    });

    for (SweepCell& c : table.cells) {
        if (const BaselineCell* b = table.baseline(c.altitude_km, c.psi_deg)) {
            c.contribution = contribution(c.result, b->result);
        }
    }
    return table;
}

std::vector<SweepHighlight> sweep_highlights(const SweepGrid& grid, const SweepTable& table)
{
    std::vector<SweepHighlight> out;
    const double min_ld = *std::min_element(grid.ld_values.begin(), grid.ld_values.end());
    for (double psi : grid.psi_list) {
        for (ManeuverKind kind : grid.kinds) {
            SweepHighlight h;
            h.psi_deg = psi;
            h.kind = kind;
            h.min_ld = min_ld;
            for (const SweepCell& c : table.cells) {
                if (c.psi_deg != psi || c.kind != kind || c.result.status != Status::ok) {
                    continue;
                }
                if (!h.max_tof_band_s || c.result.tof_band_s > *h.max_tof_band_s) {
                    h.max_tof_band_s = c.result.tof_band_s;
                }
                if (c.signed_ld != min_ld || (h.lowest_ok_altitude_km && *h.lowest_ok_altitude_km <= c.altitude_km)) {
                    continue;
                }
                const BaselineCell* b = table.baseline(c.altitude_km, psi);
                if (b == nullptr || b->result.status != Status::ok) {
                    continue;
                }
                h.lowest_ok_altitude_km = c.altitude_km;
                h.turn_angle_gain_deg = c.result.turn_angle_deg - b->result.turn_angle_deg;
                h.voe_gain_km2_s2 = c.result.voe_km2_s2 - b->result.voe_km2_s2;
            }
            out.push_back(h);
        }
    }
    return out;
}

} // namespace agasim
