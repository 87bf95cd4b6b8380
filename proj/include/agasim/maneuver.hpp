#ifndef AGASIM_MANEUVER_HPP
#define AGASIM_MANEUVER_HPP

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "agasim/aero.hpp"
#include "agasim/dynamics.hpp"
#include "agasim/planet.hpp"
#include "agasim/rkf78.hpp"

namespace agasim {

/// Rotation applied to the pericenter radial direction to obtain the
/// velocity direction: +90 deg gives a counterclockwise flyby.
enum class VelocitySense { plus_90, minus_90 };

std::string_view to_string(VelocitySense v);
VelocitySense parse_velocity_sense(std::string_view s);

enum class Status { ok, below_band, collision, captured, step_failure };

std::string_view to_string(Status s);
Status parse_status(std::string_view s);

struct ManeuverConfig {
    PlanetModel planet;
    SpacecraftModel craft;
    ManeuverKind kind = ManeuverKind::gam;
    double psi_deg = 90.0;
    double pericenter_altitude_km = 250.0;
    double pericenter_speed_vu = 0.5;
    double signed_ld = 0.0;
    VelocitySense velocity_sense = VelocitySense::plus_90;
    ThrustMode thrust_mode = ThrustMode::all_regimes;
    IntegratorSettings integrator;

    void validate() const;
    bool operator==(const ManeuverConfig&) const = default;
};

/// Forward-leg state: rotating-frame position and velocity plus the
/// accumulated thrust impulse (VU).
using ManeuverState = StateVector<5>;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TrajectoryResult {
    Status status = Status::ok;
    std::string message;

    double voe_km2_s2 = kNaN;
    double turn_angle_deg = kNaN;
    double tof_band_s = kNaN;
    double actual_pericenter_altitude_km = kNaN;
    double actual_approach_angle_deg = kNaN;
    double pericenter_altitude_deviation_km = kNaN;
    double approach_angle_deviation_deg = kNaN;
    double delta_v_km_s = kNaN;

    double aoa_deg = 0.0;
    double bank_deg = 0.0;
    double initial_energy = kNaN; // canonical
    double final_energy = kNaN;   // canonical
    /// Planet-relative two-body energy after the atmospheric passage (canonical).
    double planet_energy_after = kNaN;
    /// Relative Jacobi-constant change over both legs (meaningful for GAM).
    double jacobi_drift = kNaN;
    double final_time_tu = kNaN;

    std::vector<RotatingState> samples;
};

nlohmann::json result_to_json(const TrajectoryResult& r, bool include_samples = true);

struct RunOptions {
    bool keep_samples = false;
};

/// Pericenter state at t = 0: radius (R + h)/DU at angle psi counterclockwise
/// from the Sun-planet line, speed `pericenter_speed_vu` perpendicular to it.
RotatingState pericenter_state(const ManeuverConfig& config);

struct BackwardLeg {
    RotatingState initial_state;
    double initial_energy = 0.0;
    bool reached_distance = false; // r2 = 0.5 DU rather than t = -pi/2
    double jacobi_drift = 0.0;
};

/// Gravity-only propagation from the pericenter back to r2 = 0.5 DU or t = -pi/2.
BackwardLeg backward_leg(const ManeuverConfig& config);

namespace events {
inline constexpr std::string_view soi = "soi";
inline constexpr std::string_view band_floor = "band_floor";
inline constexpr std::string_view band_ceiling = "band_ceiling";
inline constexpr std::string_view pericenter = "pericenter";
inline constexpr std::string_view atmosphere = "atmosphere";
inline constexpr std::string_view collision = "collision";
inline constexpr std::string_view exit = "exit";
/// V-infinity parallel to the radial direction while lift acts.
inline constexpr std::string_view radial_flow = "radial_flow";
} // namespace events

struct ForwardLeg {
    Propagation<5> propagation;
    double end_distance_du = 0.5;
};

/// Perturbed propagation from the encounter start to r2 = 0.5 DU or t = +pi/2.
/// Throws DegenerateLiftError if V-infinity turns radial inside the lifting
/// layer, where the lift direction is undefined.
ForwardLeg forward_leg(const RotatingState& initial_state, const ManeuverConfig& config);

class MissingSoiCrossingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

TrajectoryResult extract_metrics(const ForwardLeg& leg, const BackwardLeg& start, const ManeuverConfig& config,
                                 const RunOptions& options = {});

/// Full procedure; integration failures are reported through the status.
TrajectoryResult run_maneuver(const ManeuverConfig& config, const RunOptions& options = {});

struct Contribution {
    std::optional<double> voe_pct;
    std::optional<double> delta_pct;
};

/// Percentage change of VOE and turn angle relative to a GAM baseline; a
/// component is empty when the baseline is not Ok or its value is ~0.
Contribution contribution(const TrajectoryResult& result, const TrajectoryResult& baseline_gam);

} // namespace agasim

#endif
