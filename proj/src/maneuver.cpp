#include "agasim/maneuver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace agasim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kEndDistanceDu = 0.5;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

RotatingState to_state(const StateVector<5>& y, double t) { return {y[0], y[1], y[2], y[3], t}; }
RotatingState to_state(const StateVector<4>& y, double t) { return {y[0], y[1], y[2], y[3], t}; }

double wrap_degrees_signed(double d)
{
    d = std::fmod(d, 360.0);
    if (d > 180.0) {
        d -= 360.0;
    } else if (d <= -180.0) {
        d += 360.0;
    }
    return d;
}

double relative_jacobi_change(double c0, double c1) { return std::abs(c1 - c0) / std::abs(c0); }

} // namespace

std::string_view to_string(VelocitySense v) { return v == VelocitySense::plus_90 ? "+90" : "-90"; }

VelocitySense parse_velocity_sense(std::string_view s)
{
    if (s == "+90" || s == "90") return VelocitySense::plus_90;
    if (s == "-90") return VelocitySense::minus_90;
    throw std::invalid_argument("velocity_sense must be \"+90\" or \"-90\", got '" + std::string(s) + "'");
}

std::string_view to_string(Status s)
{
    switch (s) {
    case Status::ok: return "ok";
    case Status::below_band: return "below_band";
    case Status::collision: return "collision";
    case Status::captured: return "captured";
    case Status::step_failure: return "step_failure";
    }
    return "?";
}

Status parse_status(std::string_view s)
{
    for (Status st : {Status::ok, Status::below_band, Status::collision, Status::captured, Status::step_failure}) {
        if (to_string(st) == s) {
            return st;
        }
    }
    throw std::invalid_argument("unknown status '" + std::string(s) + "'");
}

void ManeuverConfig::validate() const
{
    planet.validate();
    craft.validate();
    integrator.validate();
    if (!(pericenter_speed_vu > 0.0)) {
        throw std::invalid_argument("pericenter_speed_vu must be positive");
    }
    if (!std::isfinite(psi_deg)) {
        throw std::invalid_argument("psi_deg must be finite");
    }
    if (!(pericenter_altitude_km > -planet.radius_km)) {
        throw std::invalid_argument("pericenter_altitude_km must place the pericenter above the planet centre");
    }
    if (!std::isfinite(signed_ld)) {
        throw std::invalid_argument("signed_ld must be finite");
    }
    if (kind != ManeuverKind::gam) {
        const double peak = max_lift_to_drag(craft).lift_to_drag;
        if (std::abs(signed_ld) > peak) {
            throw std::invalid_argument("|signed_ld| exceeds the achievable maximum " + std::to_string(peak));
        }
    }
}

RotatingState pericenter_state(const ManeuverConfig& config)
{
    const PlanetModel& p = config.planet;
    const double psi = config.psi_deg * kDeg;
    const Vec2 radial{std::cos(psi), std::sin(psi)};
    const double rp = (p.radius_km + config.pericenter_altitude_km) / p.du_km();
    const Vec2 pos = planet_position(p.mass_ratio) + radial * rp;
    const Vec2 dir = config.velocity_sense == VelocitySense::plus_90 ? Vec2{-radial.y, radial.x}
                                                                     : Vec2{radial.y, -radial.x};
    const Vec2 vel = dir * config.pericenter_speed_vu;
    return {pos.x, pos.y, vel.x, vel.y, 0.0};
}

BackwardLeg backward_leg(const ManeuverConfig& config)
{
    const double mu = config.planet.mass_ratio;
    const RotatingState peri = pericenter_state(config);
    auto rhs = [mu](double t, const StateVector<4>& y) {
        const auto d = crtbp_derivative(to_state(y, t), mu);
        return StateVector<4>{d.dx, d.dy, d.dvx, d.dvy};
    };
    const std::vector<EventSpec<4>> ev = {
        {"exit",
         [mu](double, const StateVector<4>& y) { return std::hypot(y[0] - 1.0 + mu, y[1]) - kEndDistanceDu; },
         Crossing::rising, true, {}},
    };
    const auto prop =
        propagate<4>(rhs, StateVector<4>{peri.x, peri.y, peri.vx, peri.vy}, 0.0, -kHalfPi, ev, config.integrator);

    BackwardLeg out;
    out.initial_state = to_state(prop.final_state(), prop.final_time());
    out.initial_energy = heliocentric_energy(out.initial_state, mu);
    out.reached_distance = prop.reason == Termination::terminal_event;
    out.jacobi_drift = relative_jacobi_change(jacobi_constant(peri, mu), jacobi_constant(out.initial_state, mu));
    return out;
}

ForwardLeg forward_leg(const RotatingState& initial_state, const ManeuverConfig& config)
{
    const PlanetModel& planet = config.planet;
    const double mu = planet.mass_ratio;
    const Vec2 centre = planet_position(mu);
    const double du = planet.du_km();
    const double radius = planet.radius_km;
    const AeroModel aero(planet, config.craft, config.kind, config.signed_ld, config.thrust_mode);

    auto rhs = [mu, &aero](double t, const ManeuverState& y) {
        const RotatingState s = to_state(y, t);
        const AeroAcceleration a = aero(s);
        const auto d = crtbp_derivative(s, mu, a.perturbation);
        return ManeuverState{d.dx, d.dy, d.dvx, d.dvy, a.thrust};
    };

    auto distance = [centre](const ManeuverState& y) { return std::hypot(y[0] - centre.x, y[1] - centre.y); };
    auto altitude = [distance, du, radius](const ManeuverState& y) { return distance(y) * du - radius; };

    std::vector<EventSpec<5>> ev;
    const double soi = planet.soi_radius_du();
    ev.push_back({std::string(events::soi), [distance, soi](double, const ManeuverState& y) { return distance(y) - soi; },
                  Crossing::any, false, {}});
    const BandAltitudes band = band_altitudes(planet, config.craft);
    if (std::isfinite(band.floor_km) && std::isfinite(band.ceiling_km)) {
        ev.push_back({std::string(events::band_floor),
                      [altitude, h = band.floor_km](double, const ManeuverState& y) { return altitude(y) - h; },
                      Crossing::any, false, {}});
        ev.push_back({std::string(events::band_ceiling),
                      [altitude, h = band.ceiling_km](double, const ManeuverState& y) { return altitude(y) - h; },
                      Crossing::any, false, {}});
    }
    ev.push_back({std::string(events::pericenter),
                  [centre](double, const ManeuverState& y) {
                      return (y[0] - centre.x) * y[2] + (y[1] - centre.y) * y[3];
                  },
                  Crossing::rising, false, {}});
    if (planet.surface_density_kg_m3 > 0.0) {
        const double top = -planet.scale_height_km * std::log(kAeroDensityCutoff / planet.surface_density_kg_m3);
        ev.push_back({std::string(events::atmosphere),
                      [altitude, top](double, const ManeuverState& y) { return altitude(y) - top; }, Crossing::any,
                      false, {}});
    }
    ev.push_back({std::string(events::collision), [altitude](double, const ManeuverState& y) { return altitude(y); },
                  Crossing::falling, true, {}});
    if (config.kind != ManeuverKind::gam && config.signed_ld != 0.0 && std::isfinite(band.ceiling_km)) {
        EventSpec<5> radial{std::string(events::radial_flow),
                            [centre](double, const ManeuverState& y) {
                                return cross(Vec2{y[0] - centre.x, y[1] - centre.y}, Vec2{y[2], y[3]});
                            },
                            Crossing::any, true, {}};
        radial.active = [altitude, h = band.ceiling_km](double, const ManeuverState& y) { return altitude(y) <= h; };
        ev.push_back(std::move(radial));
    }
    ev.push_back({std::string(events::exit),
                  [distance](double, const ManeuverState& y) { return distance(y) - kEndDistanceDu; },
                  Crossing::rising, true, {}});

    const ManeuverState y0{initial_state.x, initial_state.y, initial_state.vx, initial_state.vy, 0.0};
    ForwardLeg out;
    out.end_distance_du = kEndDistanceDu;
    out.propagation = propagate<5>(rhs, y0, initial_state.t, kHalfPi, ev, config.integrator);
    const auto& log = out.propagation.events;
    if (!log.empty() && log.back().label == events::radial_flow) {
        throw DegenerateLiftError("lift direction undefined: V-infinity radial at altitude " +
                                  std::to_string(altitude(log.back().state)) + " km");
    }
    return out;
}

TrajectoryResult extract_metrics(const ForwardLeg& leg, const BackwardLeg& start, const ManeuverConfig& config,
                                 const RunOptions& options)
{
    const PlanetModel& planet = config.planet;
    const double mu = planet.mass_ratio;
    const double vu = planet.vu_km_s();
    const auto& prop = leg.propagation;
    const RotatingState final_state = to_state(prop.final_state(), prop.final_time());

    TrajectoryResult r;
    const AeroModel aero(planet, config.craft, config.kind, config.signed_ld, config.thrust_mode);
    r.aoa_deg = aero.aoa_rad() / kDeg;
    r.bank_deg = aero.bank_deg();
    r.initial_energy = start.initial_energy;
    r.final_time_tu = prop.final_time();

    const EventRecord<5>* soi_in = nullptr;
    const EventRecord<5>* soi_out = nullptr;
    const EventRecord<5>* peri = nullptr;
    const EventRecord<5>* atmosphere_exit = nullptr;
    const EventRecord<5>* collision = nullptr;
    const BandAltitudes band = band_altitudes(planet, config.craft);

    const RotatingState first = to_state(prop.states.front(), prop.times.front());
    bool in_band = false;
    double band_entry = 0.0;
    double tof_tu = 0.0;
    {
        const double h0 = planet_relative(first, planet).altitude_km;
        in_band = h0 >= band.floor_km && h0 <= band.ceiling_km;
        band_entry = first.t;
    }

    auto r2_of = [&](const EventRecord<5>& e) { return std::hypot(e.state[0] - 1.0 + mu, e.state[1]); };

    for (const auto& e : prop.events) {
        if (e.label == events::soi) {
            if (!e.rising && soi_in == nullptr) {
                soi_in = &e;
            } else if (e.rising) {
                soi_out = &e;
            }
        } else if (e.label == events::pericenter) {
            if (peri == nullptr || r2_of(e) < r2_of(*peri)) {
                peri = &e;
            }
        } else if (e.label == events::band_floor || e.label == events::band_ceiling) {
            const bool entering = (e.label == events::band_floor) == e.rising;
            if (entering && !in_band) {
                in_band = true;
                band_entry = e.t;
            } else if (!entering && in_band) {
                in_band = false;
                tof_tu += e.t - band_entry;
            }
        } else if (e.label == events::atmosphere) {
            if (e.rising && peri != nullptr && atmosphere_exit == nullptr) {
                atmosphere_exit = &e;
            }
        } else if (e.label == events::collision) {
            collision = &e;
        }
    }
    if (in_band) {
        tof_tu += final_state.t - band_entry;
    }

    if (soi_in == nullptr) {
        throw MissingSoiCrossingError("trajectory never enters the sphere of influence of " + planet.name);
    }

    const RotatingState entry = to_state(soi_in->state, soi_in->t);
    const RotatingState leave = soi_out != nullptr ? to_state(soi_out->state, soi_out->t) : final_state;
    const Vec2 v_in = planet_relative(entry, planet).velocity_inertial;
    const Vec2 v_out = planet_relative(leave, planet).velocity_inertial;
    r.turn_angle_deg = std::atan2(std::abs(cross(v_in, v_out)), dot(v_in, v_out)) / kDeg;

    r.final_energy = heliocentric_energy(final_state, mu);
    r.voe_km2_s2 = (r.final_energy - r.initial_energy) * vu * vu;
    r.tof_band_s = tof_tu * planet.tu_s();
    r.delta_v_km_s = config.kind == ManeuverKind::pagam ? prop.final_state()[4] * vu : 0.0;

    double min_altitude = kNaN;
    if (peri != nullptr) {
        const RotatingState ps = to_state(peri->state, peri->t);
        const PlanetRelative rel = planet_relative(ps, planet);
        r.actual_pericenter_altitude_km = rel.altitude_km;
        double angle = std::atan2(ps.y, ps.x - (1.0 - mu)) / kDeg;
        if (angle < 0.0) {
            angle += 360.0;
        }
        r.actual_approach_angle_deg = angle;
        r.pericenter_altitude_deviation_km = rel.altitude_km - config.pericenter_altitude_km;
        r.approach_angle_deviation_deg = wrap_degrees_signed(angle - config.psi_deg);
        min_altitude = rel.altitude_km;
    }

    const RotatingState after = atmosphere_exit != nullptr ? to_state(atmosphere_exit->state, atmosphere_exit->t)
                                                           : leave;
    r.planet_energy_after = planet_relative(after, planet).energy;

    const double c0 = jacobi_constant(first, mu);
    const double c1 = jacobi_constant(final_state, mu);
    r.jacobi_drift = std::max(start.jacobi_drift, relative_jacobi_change(c0, c1));

    // A surface impact on a later revolution of an already captured orbit reports the capture.
    const bool captured_first = atmosphere_exit != nullptr && !(r.planet_energy_after > 0.0);
    if (collision != nullptr && !(captured_first && collision->t > atmosphere_exit->t)) {
        r.status = Status::collision;
        r.message = "trajectory reached the planetary surface";
    } else if (config.kind != ManeuverKind::gam && !(min_altitude >= band.floor_km)) {
        r.status = Status::below_band;
        r.message = "pericenter below the Kn = 1e-3 altitude";
    } else if (!(r.planet_energy_after > 0.0)) {
        r.status = Status::captured;
        r.message = "planet-relative energy non-positive after the atmospheric passage";
    } else if (peri == nullptr) {
        r.status = Status::step_failure;
        r.message = "no pericenter passage detected";
    }

    if (options.keep_samples) {
        r.samples.reserve(prop.states.size());
        for (std::size_t i = 0; i < prop.states.size(); ++i) {
            r.samples.push_back(to_state(prop.states[i], prop.times[i]));
        }
    }
    return r;
}

TrajectoryResult run_maneuver(const ManeuverConfig& config, const RunOptions& options)
{
    config.validate();
    const AeroModel aero(config.planet, config.craft, config.kind, config.signed_ld, config.thrust_mode);
    auto failure = [&aero](const std::exception& e) {
        TrajectoryResult r;
        r.status = Status::step_failure;
        r.message = e.what();
        r.aoa_deg = aero.aoa_rad() / kDeg;
        r.bank_deg = aero.bank_deg();
        return r;
    };
    try {
        const BackwardLeg start = backward_leg(config);
        const ForwardLeg leg = forward_leg(start.initial_state, config);
        return extract_metrics(leg, start, config, options);
    } catch (const IntegrationError& e) {
        return failure(e);
    } catch (const SingularityError& e) {
        return failure(e);
    } catch (const DegenerateLiftError& e) {
        return failure(e);
    }
}

Contribution contribution(const TrajectoryResult& result, const TrajectoryResult& baseline_gam)
{
    Contribution c;
    if (baseline_gam.status != Status::ok || result.status != Status::ok) {
        return c;
    }
    auto pct = [](double x, double base) -> std::optional<double> {
        if (!(std::abs(base) >= 1e-12)) {
            return std::nullopt;
        }
        return 100.0 * (x - base) / std::abs(base);
    };
    c.voe_pct = pct(result.voe_km2_s2, baseline_gam.voe_km2_s2);
    c.delta_pct = pct(result.turn_angle_deg, baseline_gam.turn_angle_deg);
    return c;
}

nlohmann::json result_to_json(const TrajectoryResult& r, bool include_samples)
{
    auto num = [](double v) -> nlohmann::json { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
    nlohmann::json j = {
        {"status", std::string(to_string(r.status))},
        {"voe_km2_s2", num(r.voe_km2_s2)},
        {"turn_angle_deg", num(r.turn_angle_deg)},
        {"tof_band_s", num(r.tof_band_s)},
        {"actual_pericenter_altitude_km", num(r.actual_pericenter_altitude_km)},
        {"actual_approach_angle_deg", num(r.actual_approach_angle_deg)},
        {"pericenter_altitude_deviation_km", num(r.pericenter_altitude_deviation_km)},
        {"approach_angle_deviation_deg", num(r.approach_angle_deviation_deg)},
        {"delta_v_km_s", num(r.delta_v_km_s)},
        {"aoa_deg", num(r.aoa_deg)},
        {"bank_deg", num(r.bank_deg)},
        {"initial_energy", num(r.initial_energy)},
        {"final_energy", num(r.final_energy)},
        {"planet_energy_after", num(r.planet_energy_after)},
        {"jacobi_drift", num(r.jacobi_drift)},
        {"final_time_tu", num(r.final_time_tu)},
    };
    if (!r.message.empty()) {
        j["message"] = r.message;
    }
    if (include_samples) {
        nlohmann::json samples = nlohmann::json::array();
        for (const auto& s : r.samples) {
            samples.push_back({s.t, s.x, s.y, s.vx, s.vy});
        }
        j["samples"] = std::move(samples);
    }
    return j;
}

} // namespace agasim
