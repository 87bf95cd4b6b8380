#include "agasim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace agasim {

namespace {

using nlohmann::json;
using KeySet = std::set<std::string, std::less<>>;

const KeySet kSingleKeys = {
    "planet",        "kind",           "psi_deg",      "pericenter_altitude_km", "altitude_km", "pericenter_speed_vu",
    "signed_ld",     "ld",             "velocity_sense", "spacecraft",           "integrator",  "thrust_mode",
};

const KeySet kSweepKeys = {
    "planet",        "altitude_km", "ld",          "ld_list",    "psi_list",   "kinds",     "workers",
    "output_dir",    "pericenter_speed_vu", "velocity_sense", "spacecraft", "integrator", "thrust_mode",
};

void reject_unknown(const json& j, const KeySet& allowed, std::string_view where)
{
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("unknown key '" + key + "' in " + std::string(where));
        }
    }
}

double number(const json& j, std::string_view key)
{
    const auto& v = j.at(std::string(key));
    if (!v.is_number()) {
        throw ConfigError("field '" + std::string(key) + "' must be a number");
    }
    return v.get<double>();
}

std::string string_field(const json& j, std::string_view key)
{
    const auto& v = j.at(std::string(key));
    if (!v.is_string()) {
        throw ConfigError("field '" + std::string(key) + "' must be a string");
    }
    return v.get<std::string>();
}

/// Runs `f`, rethrowing library validation errors as ConfigError naming `field`.
template <class F>
auto with_field(std::string_view field, F&& f)
{
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("field '" + std::string(field) + "': " + e.what());
    }
}

/// Settings common to single runs and sweeps.
ManeuverConfig parse_shared(const json& j, const PlanetCatalog& catalog)
{
    ManeuverConfig c;
    if (!j.contains("planet")) {
        throw ConfigError("missing required field 'planet'");
    }
    const std::string planet = string_field(j, "planet");
    c.planet = with_field("planet", [&] { return catalog.get(planet); });
    if (j.contains("spacecraft")) {
        c.craft = with_field("spacecraft", [&] { return spacecraft_from_json(j.at("spacecraft")); });
    }
    if (j.contains("integrator")) {
        c.integrator = with_field("integrator", [&] { return integrator_from_json(j.at("integrator")); });
    }
    if (j.contains("pericenter_speed_vu")) {
        c.pericenter_speed_vu = number(j, "pericenter_speed_vu");
    }
    if (j.contains("velocity_sense")) {
        const std::string s = string_field(j, "velocity_sense");
        c.velocity_sense = with_field("velocity_sense", [&] { return parse_velocity_sense(s); });
    }
    if (j.contains("thrust_mode")) {
        const std::string s = string_field(j, "thrust_mode");
        c.thrust_mode = with_field("thrust_mode", [&] { return parse_thrust_mode(s); });
    }
    return c;
}

bool is_sweep(const json& j)
{
    if (j.contains("altitude_km") && j.at("altitude_km").is_object()) return true;
    if (j.contains("ld") && j.at("ld").is_object()) return true;
    for (const char* key : {"ld_list", "psi_list", "kinds", "workers", "output_dir"}) {
        if (j.contains(key)) return true;
    }
    return false;
}

ManeuverConfig parse_single(const json& j, const PlanetCatalog& catalog)
{
    reject_unknown(j, kSingleKeys, "single-run config");
    ManeuverConfig c = parse_shared(j, catalog);
    auto alias = [&j](const char* primary, const char* secondary) -> const char* {
        if (j.contains(primary) && j.contains(secondary)) {
            throw ConfigError(std::string("fields '") + primary + "' and '" + secondary + "' are aliases; give one");
        }
        if (j.contains(primary)) return primary;
        if (j.contains(secondary)) return secondary;
        return nullptr;
    };
    if (j.contains("kind")) {
        const std::string s = string_field(j, "kind");
        c.kind = with_field("kind", [&] { return parse_maneuver_kind(s); });
    }
    if (j.contains("psi_deg")) {
        c.psi_deg = number(j, "psi_deg");
    }
    if (const char* key = alias("pericenter_altitude_km", "altitude_km")) {
        c.pericenter_altitude_km = number(j, key);
    }
    if (const char* key = alias("signed_ld", "ld")) {
        c.signed_ld = number(j, key);
    }
    with_field("config", [&] {
        c.validate();
        return 0;
    });
    return c;
}

SweepGrid parse_sweep(const json& j, const PlanetCatalog& catalog)
{
    reject_unknown(j, kSweepKeys, "sweep config");
    SweepGrid g;
    g.base = parse_shared(j, catalog);

    const AltitudeWindow window = default_altitude_window(g.base.planet, g.base.craft);
    g.altitude_min_km = window.min_km;
    g.altitude_max_km = window.max_km;
    if (j.contains("altitude_km")) {
        const json& a = j.at("altitude_km");
        if (!a.is_object()) {
            throw ConfigError("field 'altitude_km' must be an object {min, max, step} in a sweep");
        }
        reject_unknown(a, {"min", "max", "step"}, "'altitude_km'");
        if (a.contains("min")) g.altitude_min_km = number(a, "min");
        if (a.contains("max")) g.altitude_max_km = number(a, "max");
        if (a.contains("step")) g.altitude_step_km = number(a, "step");
    }

    if (j.contains("ld") && j.contains("ld_list")) {
        throw ConfigError("give either 'ld' or 'ld_list', not both");
    }
    const double peak = max_lift_to_drag(g.base.craft).lift_to_drag;
    if (j.contains("ld_list")) {
        const json& l = j.at("ld_list");
        if (!l.is_array()) {
            throw ConfigError("field 'ld_list' must be an array of numbers");
        }
        for (const auto& v : l) {
            if (!v.is_number()) {
                throw ConfigError("field 'ld_list' must be an array of numbers");
            }
            g.ld_values.push_back(v.get<double>());
        }
    } else {
        double min = -peak;
        double max = peak;
        int count = 41;
        if (j.contains("ld")) {
            const json& l = j.at("ld");
            if (!l.is_object()) {
                throw ConfigError("field 'ld' must be an object {min, max, count} in a sweep");
            }
            reject_unknown(l, {"min", "max", "count"}, "'ld'");
            if (l.contains("min")) min = number(l, "min");
            if (l.contains("max")) max = number(l, "max");
            if (l.contains("count")) {
                if (!l.at("count").is_number_integer() || l.at("count").get<long long>() < 1) {
                    throw ConfigError("field 'ld.count' must be a positive integer");
                }
                count = l.at("count").get<int>();
            }
        }
        if (max < min) {
            throw ConfigError("field 'ld': max must be >= min");
        }
        g.ld_values = linspace(min, max, count);
    }

    if (j.contains("psi_list")) {
        const json& p = j.at("psi_list");
        if (!p.is_array()) {
            throw ConfigError("field 'psi_list' must be an array of numbers");
        }
        g.psi_list.clear();
        for (const auto& v : p) {
            if (!v.is_number()) {
                throw ConfigError("field 'psi_list' must be an array of numbers");
            }
            g.psi_list.push_back(v.get<double>());
        }
    }
    if (j.contains("kinds")) {
        const json& k = j.at("kinds");
        if (!k.is_array()) {
            throw ConfigError("field 'kinds' must be an array of strings");
        }
        g.kinds.clear();
        for (const auto& v : k) {
            if (!v.is_string()) {
                throw ConfigError("field 'kinds' must be an array of strings");
            }
            const std::string s = v.get<std::string>();
            g.kinds.push_back(with_field("kinds", [&] { return parse_maneuver_kind(s); }));
        }
    }
    if (j.contains("workers")) {
        const json& w = j.at("workers");
        if (!w.is_number_integer() || w.get<long long>() < 1) {
            throw ConfigError("field 'workers' must be a positive integer");
        }
        g.workers = w.get<unsigned>();
    } else {
        g.workers = std::max(1u, std::thread::hardware_concurrency());
    }
    if (j.contains("output_dir")) {
        g.output_dir = string_field(j, "output_dir");
    }
    g.validate();
    return g;
}

} // namespace

std::vector<double> linspace(double min, double max, int count)
{
    if (count < 1) {
        throw std::invalid_argument("linspace: count must be positive");
    }
    std::vector<double> out(static_cast<std::size_t>(count), min);
    for (int i = 1; i < count; ++i) {
        const double f = static_cast<double>(i) / (count - 1);
        out[static_cast<std::size_t>(i)] = min * (1.0 - f) + max * f;
    }
    return out;
}

AltitudeWindow default_altitude_window(const PlanetModel& planet, const SpacecraftModel& craft)
{
    std::string id = planet.name;
    std::transform(id.begin(), id.end(), id.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (id == "venus") return {230.0, 270.0};
    if (id == "mars") return {70.0, 100.0};
    const BandAltitudes band = band_altitudes(planet, craft);
    if (!std::isfinite(band.floor_km) || !std::isfinite(band.ceiling_km)) {
        throw ConfigError("planet '" + planet.name + "' has no analysis band; give 'altitude_km' explicitly");
    }
    return {std::floor(band.floor_km), std::ceil(band.ceiling_km)};
}

std::vector<double> SweepGrid::altitudes() const
{
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
        const double h = altitude_min_km + static_cast<double>(i) * altitude_step_km;
        if (h > altitude_max_km + 1e-9) {
            break;
        }
        out.push_back(h);
    }
    return out;
}

void SweepGrid::validate() const
{
    with_field("config", [&] {
        base.planet.validate();
        base.craft.validate();
        base.integrator.validate();
        return 0;
    });
    if (!(altitude_step_km > 0.0)) {
        throw ConfigError("field 'altitude_km.step' must be positive");
    }
    if (!(altitude_max_km >= altitude_min_km)) {
        throw ConfigError("field 'altitude_km': max must be >= min");
    }
    if (!(altitude_min_km > -base.planet.radius_km)) {
        throw ConfigError("field 'altitude_km.min' lies inside the planet centre");
    }
    if (kinds.empty()) throw ConfigError("field 'kinds' must be nonempty");
    if (psi_list.empty()) throw ConfigError("field 'psi_list' must be nonempty");
    if (ld_values.empty()) throw ConfigError("field 'ld' must yield at least one value");
    if (workers < 1) throw ConfigError("field 'workers' must be positive");
    if (altitudes().size() > 100000) throw ConfigError("field 'altitude_km' yields more than 100000 altitudes");
    const double peak = max_lift_to_drag(base.craft).lift_to_drag;
    for (double ld : ld_values) {
        if (!std::isfinite(ld) || std::abs(ld) > peak) {
            throw ConfigError("L/D value " + std::to_string(ld) + " outside the achievable range +-" +
                              std::to_string(peak));
        }
    }
    for (double psi : psi_list) {
        if (!std::isfinite(psi)) throw ConfigError("field 'psi_list' must contain finite values");
    }
    if (!(base.pericenter_speed_vu > 0.0)) {
        throw ConfigError("field 'pericenter_speed_vu' must be positive");
    }
}

ResolvedConfig parse_config(const nlohmann::json& j, const PlanetCatalog& catalog)
{
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    try {
        if (is_sweep(j)) {
            return parse_sweep(j, catalog);
        }
        return parse_single(j, catalog);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("mistyped config field: ") + e.what());
    }
}

ResolvedConfig load_config(const std::filesystem::path& path, const PlanetCatalog& catalog)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    try {
        return parse_config(j, catalog);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

namespace {

json shared_to_json(const ManeuverConfig& c)
{
    return {
        {"planet", c.planet.name},
        {"pericenter_speed_vu", c.pericenter_speed_vu},
        {"velocity_sense", std::string(to_string(c.velocity_sense))},
        {"thrust_mode", std::string(to_string(c.thrust_mode))},
        {"spacecraft", spacecraft_to_json(c.craft)},
        {"integrator", integrator_to_json(c.integrator)},
    };
}

} // namespace

nlohmann::json config_to_json(const ManeuverConfig& c)
{
    json j = shared_to_json(c);
    j["kind"] = std::string(to_string(c.kind));
    j["psi_deg"] = c.psi_deg;
    j["pericenter_altitude_km"] = c.pericenter_altitude_km;
    j["signed_ld"] = c.signed_ld;
    return j;
}

nlohmann::json config_to_json(const SweepGrid& g)
{
    json j = shared_to_json(g.base);
    j["altitude_km"] = {{"min", g.altitude_min_km}, {"max", g.altitude_max_km}, {"step", g.altitude_step_km}};
    j["ld_list"] = g.ld_values;
    j["psi_list"] = g.psi_list;
    json kinds = json::array();
    for (ManeuverKind k : g.kinds) {
        kinds.push_back(std::string(to_string(k)));
    }
    j["kinds"] = std::move(kinds);
    j["workers"] = g.workers;
    if (!g.output_dir.empty()) {
        j["output_dir"] = g.output_dir;
    }
    return j;
}

nlohmann::json config_to_json(const ResolvedConfig& config)
{
    return std::visit([](const auto& c) { return config_to_json(c); }, config);
}

std::string config_schema_help()
{
    return R"(Config file (JSON object).
Single run:
  planet                  string, catalog id (required)
  kind                    "gam" | "agam" | "pagam" (default "gam")
  psi_deg                 number, pericenter angle from the Sun-planet line (default 90)
  pericenter_altitude_km  number (alias altitude_km; default 250)
  pericenter_speed_vu     number (default 0.5)
  signed_ld               number, sign selects bank 0/180 deg (alias ld; default 0)
  velocity_sense          "+90" | "-90" (default "+90")
  thrust_mode             "all_regimes" | "continuum_only" (default "all_regimes")
  spacecraft              object, optional overrides of area_to_mass_m2_kg, reference_length_m,
                          cd_free_molecular, newtonian_lift_constant, newtonian_zero_drag, max_aoa_deg
  integrator              object, optional overrides of rel_tol, abs_tol, h_init, h_min, h_max,
                          max_steps, event_time_tol, adaptive
Sweep (selected when altitude_km is an object or any sweep key is present):
  altitude_km             {"min", "max", "step"} (default Venus 230-270, Mars 70-100, step 1)
  ld                      {"min", "max", "count"} (default -max..+max L/D, 41 values)
  ld_list                 [numbers], alternative to ld
  psi_list                [numbers] (default [90, 270])
  kinds                   [strings] (default ["agam", "pagam"])
  workers                 integer (default: hardware threads)
  output_dir              string, optional
  plus planet, pericenter_speed_vu, velocity_sense, thrust_mode, spacecraft, integrator.
)";
}

} // namespace agasim
