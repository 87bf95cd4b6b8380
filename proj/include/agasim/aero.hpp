#ifndef AGASIM_AERO_HPP
#define AGASIM_AERO_HPP

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "agasim/dynamics.hpp"
#include "agasim/planet.hpp"

namespace agasim {

inline constexpr double kFreeMolecularKn = 10.0;
inline constexpr double kContinuumKn = 1e-2;
inline constexpr double kBandKnMin = 1e-3;
inline constexpr double kBandKnMax = 1e-2;
/// Aerodynamic forces are switched off below this density (kg/m^3).
inline constexpr double kAeroDensityCutoff = 1e-15;

class AeroDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DegenerateLiftError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Vehicle constants. The continuum coefficients follow a Newtonian fit
/// C_L = k sin^2(a) cos(a), C_D = C_D0 + k sin^3(a), valid up to 20 deg.
struct SpacecraftModel {
    double area_to_mass_m2_kg = 0.02;
    double reference_length_m = 5.0;
    double cd_free_molecular = 1.0;
    double newtonian_lift_constant = 3.49;
    double newtonian_zero_drag = 0.046;
    double max_aoa_deg = 17.0;

    void validate() const;
    bool operator==(const SpacecraftModel&) const = default;
};

/// Applies the keys present in `j` on top of `base`; unknown keys are rejected.
SpacecraftModel spacecraft_from_json(const nlohmann::json& j, SpacecraftModel base = {});
nlohmann::json spacecraft_to_json(const SpacecraftModel& craft);

enum class Regime { free_molecular, transition, continuum };

struct FlowRegime {
    Regime regime = Regime::free_molecular;
    bool in_analysis_band = false;
};

std::string_view to_string(Regime r);

enum class ManeuverKind { gam, agam, pagam };

std::string_view to_string(ManeuverKind k);
ManeuverKind parse_maneuver_kind(std::string_view s);

/// Where a PAGAM thrusts against drag.
enum class ThrustMode { all_regimes, continuum_only };

std::string_view to_string(ThrustMode m);
ThrustMode parse_thrust_mode(std::string_view s);

/// Exponential isothermal atmosphere, kg/m^3.
double density(double altitude_km, const PlanetModel& planet);

/// Mean free path (m) of the planet's gas at the given density.
double mean_free_path_m(double density_kg_m3, const PlanetModel& planet);

double knudsen(double altitude_km, const PlanetModel& planet, const SpacecraftModel& craft);

/// Altitude (km) at which the Knudsen number equals `kn`.
double altitude_for_knudsen(double kn, const PlanetModel& planet, const SpacecraftModel& craft);

struct BandAltitudes {
    double floor_km = 0.0;   // Kn = 1e-3
    double ceiling_km = 0.0; // Kn = 1e-2
};

BandAltitudes band_altitudes(const PlanetModel& planet, const SpacecraftModel& craft);

FlowRegime classify_regime(double kn);

struct AeroCoefficients {
    double cl = 0.0;
    double cd = 0.0;
};

AeroCoefficients continuum_coefficients(double aoa_rad, const SpacecraftModel& craft);

double lift_to_drag(double aoa_rad, const SpacecraftModel& craft);

struct LiftToDragPeak {
    double aoa_rad = 0.0;
    double lift_to_drag = 0.0;
};

/// Maximum of the continuum L/D over [0, max_aoa]; the fit is increasing up to it.
LiftToDragPeak max_lift_to_drag(const SpacecraftModel& craft);

/// Angle of attack on the increasing branch of L/D; throws AeroDomainError
/// when `ld_abs` exceeds the achievable maximum.
double ld_to_aoa(double ld_abs, const SpacecraftModel& craft);

/// Transition-regime weight: 0 at Kn = 1e-2, 1 at Kn = 10.
double bridge_function(double kn);

double drag_coefficient(double kn, double aoa_rad, const SpacecraftModel& craft);

struct AeroAcceleration {
    Vec2 perturbation; // net aero + thrust acceleration, DU/TU^2
    double drag = 0.0;   // drag magnitude, DU/TU^2
    double thrust = 0.0; // thrust magnitude (PAGAM), DU/TU^2
};

/// Aerodynamic (and PAGAM thrust) acceleration for a fixed signed L/D. The
/// angle of attack is resolved once at construction; the sign of the L/D
/// selects bank 0 deg (lift away from the planet) or 180 deg.
class AeroModel {
public:
    AeroModel(const PlanetModel& planet, const SpacecraftModel& craft, ManeuverKind kind, double signed_ld,
              ThrustMode thrust_mode = ThrustMode::all_regimes);

    AeroAcceleration operator()(Vec2 position, Vec2 velocity) const;
    AeroAcceleration operator()(const RotatingState& s) const { return (*this)(s.position(), s.velocity()); }

    double aoa_rad() const { return aoa_rad_; }
    double bank_deg() const { return signed_ld_ < 0.0 ? 180.0 : 0.0; }
    ManeuverKind kind() const { return kind_; }

private:
    PlanetModel planet_;
    SpacecraftModel craft_;
    ManeuverKind kind_;
    double signed_ld_;
    ThrustMode thrust_mode_;
    double aoa_rad_ = 0.0;
    AeroCoefficients continuum_;
    double accel_unit_;
};

AeroAcceleration aero_acceleration(const RotatingState& s, const PlanetModel& planet, const SpacecraftModel& craft,
                                   ManeuverKind kind, double signed_ld,
                                   ThrustMode thrust_mode = ThrustMode::all_regimes);

} // namespace agasim

#endif
