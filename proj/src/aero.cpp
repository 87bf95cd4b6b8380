#include "agasim/aero.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>

#include <boost/math/tools/roots.hpp>

namespace agasim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double deg_to_rad(double d) { return d * kDeg; }

/// Numerator of d(L/D)/d(alpha) up to the positive factor 1/C_D^2.
double ld_slope_numerator(double a, const SpacecraftModel& craft)
{
    const double k = craft.newtonian_lift_constant;
    const double s = std::sin(a);
    const double c = std::cos(a);
    const double cl = k * s * s * c;
    const double cd = craft.newtonian_zero_drag + k * s * s * s;
    const double dcl = k * (2.0 * s * c * c - s * s * s);
    const double dcd = 3.0 * k * s * s * c;
    return dcl * cd - cl * dcd;
}

template <class F>
double bracketed_root(F&& f, double lo, double hi)
{
    std::uintmax_t max_iter = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, [](double x, double y) { return std::abs(y - x) <= 1e-15; }, max_iter);
    return 0.5 * (a + b);
}

} // namespace

void SpacecraftModel::validate() const
{
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) {
            throw AeroDomainError(std::string("spacecraft field '") + field + "' " + what);
        }
    };
    require(area_to_mass_m2_kg > 0.0, "area_to_mass_m2_kg", "must be positive");
    require(reference_length_m > 0.0, "reference_length_m", "must be positive");
    require(cd_free_molecular > 0.0, "cd_free_molecular", "must be positive");
    require(newtonian_lift_constant > 0.0, "newtonian_lift_constant", "must be positive");
    require(newtonian_zero_drag > 0.0, "newtonian_zero_drag", "must be positive");
    require(max_aoa_deg > 0.0 && max_aoa_deg <= 20.0, "max_aoa_deg", "must lie in (0, 20]");
}

SpacecraftModel spacecraft_from_json(const nlohmann::json& j, SpacecraftModel base)
{
    if (!j.is_object()) {
        throw AeroDomainError("'spacecraft' must be a JSON object");
    }
    static const std::set<std::string, std::less<>> keys = {
        "area_to_mass_m2_kg", "reference_length_m",     "cd_free_molecular",
        "newtonian_lift_constant", "newtonian_zero_drag", "max_aoa_deg",
    };
    for (const auto& [key, value] : j.items()) {
        if (!keys.contains(key)) {
            throw AeroDomainError("unknown spacecraft key '" + key + "'");
        }
        if (!value.is_number()) {
            throw AeroDomainError("spacecraft field '" + key + "' must be a number");
        }
    }
    auto take = [&j](const char* key, double& dst) {
        if (j.contains(key)) {
            dst = j.at(key).get<double>();
        }
    };
    take("area_to_mass_m2_kg", base.area_to_mass_m2_kg);
    take("reference_length_m", base.reference_length_m);
    take("cd_free_molecular", base.cd_free_molecular);
    take("newtonian_lift_constant", base.newtonian_lift_constant);
    take("newtonian_zero_drag", base.newtonian_zero_drag);
    take("max_aoa_deg", base.max_aoa_deg);
    base.validate();
    return base;
}

nlohmann::json spacecraft_to_json(const SpacecraftModel& craft)
{
    return {
        {"area_to_mass_m2_kg", craft.area_to_mass_m2_kg},
        {"reference_length_m", craft.reference_length_m},
        {"cd_free_molecular", craft.cd_free_molecular},
        {"newtonian_lift_constant", craft.newtonian_lift_constant},
        {"newtonian_zero_drag", craft.newtonian_zero_drag},
        {"max_aoa_deg", craft.max_aoa_deg},
    };
}

std::string_view to_string(Regime r)
{
    switch (r) {
    case Regime::free_molecular: return "free_molecular";
    case Regime::transition: return "transition";
    case Regime::continuum: return "continuum";
    }
    return "?";
}

std::string_view to_string(ManeuverKind k)
{
    switch (k) {
    case ManeuverKind::gam: return "gam";
    case ManeuverKind::agam: return "agam";
    case ManeuverKind::pagam: return "pagam";
    }
    return "?";
}

ManeuverKind parse_maneuver_kind(std::string_view s)
{
    if (s == "gam") return ManeuverKind::gam;
    if (s == "agam") return ManeuverKind::agam;
    if (s == "pagam") return ManeuverKind::pagam;
    throw std::invalid_argument("unknown maneuver kind '" + std::string(s) + "' (expected gam, agam or pagam)");
}

std::string_view to_string(ThrustMode m)
{
    return m == ThrustMode::all_regimes ? "all_regimes" : "continuum_only";
}

ThrustMode parse_thrust_mode(std::string_view s)
{
    if (s == "all_regimes") return ThrustMode::all_regimes;
    if (s == "continuum_only") return ThrustMode::continuum_only;
    throw std::invalid_argument("unknown thrust mode '" + std::string(s) +
                                "' (expected all_regimes or continuum_only)");
}

double density(double altitude_km, const PlanetModel& planet)
{
    return planet.surface_density_kg_m3 * std::exp(-altitude_km / planet.scale_height_km);
}

double mean_free_path_m(double density_kg_m3, const PlanetModel& planet)
{
    const double d = planet.kinetic_diameter_m;
    return planet.molecular_weight_kg_mol / (std::numbers::sqrt2 * std::numbers::pi * d * d * kAvogadro * density_kg_m3);
}

double knudsen(double altitude_km, const PlanetModel& planet, const SpacecraftModel& craft)
{
    return mean_free_path_m(density(altitude_km, planet), planet) / craft.reference_length_m;
}

double altitude_for_knudsen(double kn, const PlanetModel& planet, const SpacecraftModel& craft)
{
    const double d = planet.kinetic_diameter_m;
    const double rho = planet.molecular_weight_kg_mol /
                       (std::numbers::sqrt2 * std::numbers::pi * d * d * kAvogadro * kn * craft.reference_length_m);
    return -planet.scale_height_km * std::log(rho / planet.surface_density_kg_m3);
}

BandAltitudes band_altitudes(const PlanetModel& planet, const SpacecraftModel& craft)
{
    return {altitude_for_knudsen(kBandKnMin, planet, craft), altitude_for_knudsen(kBandKnMax, planet, craft)};
}

FlowRegime classify_regime(double kn)
{
    if (!(kn > 0.0)) {
        throw AeroDomainError("Knudsen number must be positive");
    }
    FlowRegime out;
    if (kn >= kFreeMolecularKn) {
        out.regime = Regime::free_molecular;
    } else if (kn <= kContinuumKn) {
        out.regime = Regime::continuum;
    } else {
        out.regime = Regime::transition;
    }
    out.in_analysis_band = kn >= kBandKnMin && kn <= kBandKnMax;
    return out;
}

AeroCoefficients continuum_coefficients(double aoa_rad, const SpacecraftModel& craft)
{
    if (!(aoa_rad >= 0.0) || aoa_rad > deg_to_rad(craft.max_aoa_deg) * (1.0 + 1e-12)) {
        throw AeroDomainError("angle of attack outside [0, max_aoa]");
    }
    const double k = craft.newtonian_lift_constant;
    const double s = std::sin(aoa_rad);
    return {k * s * s * std::cos(aoa_rad), craft.newtonian_zero_drag + k * s * s * s};
}

double lift_to_drag(double aoa_rad, const SpacecraftModel& craft)
{
    const auto c = continuum_coefficients(aoa_rad, craft);
    return c.cl / c.cd;
}

LiftToDragPeak max_lift_to_drag(const SpacecraftModel& craft)
{
    const double hi = deg_to_rad(craft.max_aoa_deg);
    double peak = hi;
    // The slope starts positive; a sign change inside the range is the peak.
    if (ld_slope_numerator(hi, craft) < 0.0) {
        peak = bracketed_root([&craft](double a) { return ld_slope_numerator(a, craft); }, 1e-6, hi);
    }
    return {peak, lift_to_drag(peak, craft)};
}

double ld_to_aoa(double ld_abs, const SpacecraftModel& craft)
{
    if (!(ld_abs >= 0.0)) {
        throw AeroDomainError("|L/D| must be nonnegative");
    }
    const auto peak = max_lift_to_drag(craft);
    if (ld_abs > peak.lift_to_drag) {
        throw AeroDomainError("|L/D| = " + std::to_string(ld_abs) + " exceeds the achievable maximum " +
                              std::to_string(peak.lift_to_drag));
    }
    if (ld_abs == 0.0) {
        return 0.0;
    }
    if (ld_abs == peak.lift_to_drag) {
        return peak.aoa_rad;
    }
    return bracketed_root([&](double a) { return lift_to_drag(a, craft) - ld_abs; }, 0.0, peak.aoa_rad);
}

double bridge_function(double kn)
{
    if (kn <= kContinuumKn) {
        return 0.0;
    }
    if (kn >= kFreeMolecularKn) {
        return 1.0;
    }
    const double s = std::sin(0.5 * std::numbers::pi * (std::log10(kn) + 2.0) / 3.0);
    return s * s;
}

double drag_coefficient(double kn, double aoa_rad, const SpacecraftModel& craft)
{
    const FlowRegime flow = classify_regime(kn);
    switch (flow.regime) {
    case Regime::free_molecular: return craft.cd_free_molecular;
    case Regime::continuum: return continuum_coefficients(aoa_rad, craft).cd;
    case Regime::transition: {
        const double cont = continuum_coefficients(aoa_rad, craft).cd;
        return cont + (craft.cd_free_molecular - cont) * bridge_function(kn);
    }
    }
    return craft.cd_free_molecular;
}

AeroModel::AeroModel(const PlanetModel& planet, const SpacecraftModel& craft, ManeuverKind kind, double signed_ld,
                     ThrustMode thrust_mode)
    : planet_(planet),
      craft_(craft),
      kind_(kind),
      signed_ld_(kind == ManeuverKind::gam ? 0.0 : signed_ld),
      thrust_mode_(thrust_mode),
      accel_unit_(planet.accel_unit_m_s2())
{
    craft_.validate();
    aoa_rad_ = ld_to_aoa(std::abs(signed_ld_), craft_);
    continuum_ = continuum_coefficients(aoa_rad_, craft_);
}

AeroAcceleration AeroModel::operator()(Vec2 position, Vec2 velocity) const
{
    AeroAcceleration out;
    if (kind_ == ManeuverKind::gam) {
        return out;
    }
    const Vec2 rel = position - planet_position(planet_.mass_ratio);
    const double r2 = norm(rel);
    const double h = r2 * planet_.du_km() - planet_.radius_km;
    const double rho = density(h, planet_);
    if (!(rho >= kAeroDensityCutoff)) {
        return out;
    }

    const double speed = norm(velocity);
    const double kn = mean_free_path_m(rho, planet_) / craft_.reference_length_m;
    const FlowRegime flow = classify_regime(kn);

    double cd = craft_.cd_free_molecular;
    double ld = 0.0;
    if (flow.regime == Regime::continuum) {
        cd = continuum_.cd;
        ld = continuum_.cl / continuum_.cd;
    } else if (flow.regime == Regime::transition) {
        cd = continuum_.cd + (craft_.cd_free_molecular - continuum_.cd) * bridge_function(kn);
    }

    if (ld > 0.0 && speed < 1e-12) {
        throw DegenerateLiftError("lift direction undefined at zero airspeed");
    }
    if (speed == 0.0) {
        return out;
    }

    const double speed_m_s = speed * planet_.vu_km_s() * 1000.0;
    const double drag = 0.5 * cd * craft_.area_to_mass_m2_kg * rho * speed_m_s * speed_m_s / accel_unit_;
    const Vec2 along = velocity * (1.0 / speed);

    Vec2 lift_vec;
    if (ld > 0.0) {
        Vec2 normal{-along.y, along.x};
        const double radial = dot(normal, rel * (1.0 / r2));
        if (std::abs(radial) < 1e-12) {
            throw DegenerateLiftError("airspeed is radial; lift direction undefined");
        }
        if ((radial < 0.0) != (signed_ld_ < 0.0)) {
            normal = -normal;
        }
        lift_vec = normal * (drag * ld);
    }

    out.drag = drag;
    const bool thrusting = kind_ == ManeuverKind::pagam &&
                           (thrust_mode_ == ThrustMode::all_regimes || flow.regime == Regime::continuum);
    if (thrusting) {
        out.thrust = drag;
        out.perturbation = lift_vec;
    } else {
        out.perturbation = lift_vec + along * (-drag);
    }
    return out;
}

AeroAcceleration aero_acceleration(const RotatingState& s, const PlanetModel& planet, const SpacecraftModel& craft,
                                   ManeuverKind kind, double signed_ld, ThrustMode thrust_mode)
{
    return AeroModel(planet, craft, kind, signed_ld, thrust_mode)(s);
}

} // namespace agasim
