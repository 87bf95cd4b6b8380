#include "agasim/planet.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>

#ifndef AGASIM_DATA_DIR
#define AGASIM_DATA_DIR "data"
#endif

namespace agasim {

double PlanetModel::tu_s() const { return orbital_period_s / (2.0 * std::numbers::pi); }

double PlanetModel::accel_unit_m_s2() const
{
    const double tu = tu_s();
    return du_km() * 1000.0 / (tu * tu);
}

double PlanetModel::soi_radius_du() const
{
    return std::pow(mass_ratio / (1.0 - mass_ratio), 0.4);
}

double PlanetModel::gm_km3_s2() const
{
    const double vu = vu_km_s();
    return mass_ratio * du_km() * vu * vu;
}

void PlanetModel::validate() const
{
    auto require = [this](bool ok, const char* field, const char* what) {
        if (!ok) {
            throw CatalogError("planet '" + name + "': field '" + field + "' " + what);
        }
    };
    require(!name.empty(), "name", "must be nonempty");
    require(mass_ratio > 0.0 && mass_ratio < 0.5, "mass_ratio", "must lie in (0, 0.5)");
    require(semi_major_axis_km > 0.0, "semi_major_axis_km", "must be positive");
    require(orbital_period_s > 0.0, "orbital_period_s", "must be positive");
    require(radius_km > 0.0, "radius_km", "must be positive");
    require(surface_density_kg_m3 >= 0.0, "surface_density_kg_m3", "must be nonnegative");
    require(scale_height_km > 0.0, "scale_height_km", "must be positive");
    require(molecular_weight_kg_mol > 0.0, "molecular_weight_kg_mol", "must be positive");
    require(kinetic_diameter_m > 0.0, "kinetic_diameter_m", "must be positive");
    require(radius_km < semi_major_axis_km, "radius_km", "must be smaller than the orbit");
}

namespace {

const std::set<std::string, std::less<>> kPlanetKeys = {
    "name",
    "mass_ratio",
    "semi_major_axis_km",
    "orbital_period_s",
    "radius_km",
    "surface_density_kg_m3",
    "scale_height_km",
    "molecular_weight_kg_mol",
    "kinetic_diameter_m",
};

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

} // namespace

PlanetModel planet_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) {
        throw CatalogError("planet record must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!kPlanetKeys.contains(key)) {
            throw CatalogError("unknown planet key '" + key + "'");
        }
    }
    for (const auto& key : kPlanetKeys) {
        if (!j.contains(key)) {
            throw CatalogError("planet record is missing '" + key + "'");
        }
    }

    PlanetModel p;
    try {
        p.name = j.at("name").get<std::string>();
        p.mass_ratio = j.at("mass_ratio").get<double>();
        p.semi_major_axis_km = j.at("semi_major_axis_km").get<double>();
        p.orbital_period_s = j.at("orbital_period_s").get<double>();
        p.radius_km = j.at("radius_km").get<double>();
        p.surface_density_kg_m3 = j.at("surface_density_kg_m3").get<double>();
        p.scale_height_km = j.at("scale_height_km").get<double>();
        p.molecular_weight_kg_mol = j.at("molecular_weight_kg_mol").get<double>();
        p.kinetic_diameter_m = j.at("kinetic_diameter_m").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw CatalogError(std::string("planet record has a mistyped field: ") + e.what());
    }
    p.validate();
    return p;
}

nlohmann::json planet_to_json(const PlanetModel& p)
{
    return {
        {"name", p.name},
        {"mass_ratio", p.mass_ratio},
        {"semi_major_axis_km", p.semi_major_axis_km},
        {"orbital_period_s", p.orbital_period_s},
        {"radius_km", p.radius_km},
        {"surface_density_kg_m3", p.surface_density_kg_m3},
        {"scale_height_km", p.scale_height_km},
        {"molecular_weight_kg_mol", p.molecular_weight_kg_mol},
        {"kinetic_diameter_m", p.kinetic_diameter_m},
    };
}

PlanetCatalog::PlanetCatalog(std::vector<PlanetModel> planets) : planets_(std::move(planets))
{
    std::set<std::string> seen;
    for (const auto& p : planets_) {
        p.validate();
        if (!seen.insert(lower(p.name)).second) {
            throw CatalogError("duplicate planet '" + p.name + "'");
        }
    }
}

PlanetCatalog PlanetCatalog::parse(const nlohmann::json& j)
{
    // Either a bare array of records or {"planets": [...]}, with optional
    // per-record provenance notes kept outside the records themselves.
    const nlohmann::json* records = &j;
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (key != "planets" && key != "sources") {
                throw CatalogError("unknown catalog key '" + key + "'");
            }
        }
        if (!j.contains("planets")) {
            throw CatalogError("catalog object has no 'planets' array");
        }
        records = &j.at("planets");
    }
    if (!records->is_array()) {
        throw CatalogError("catalog 'planets' must be an array");
    }
    std::vector<PlanetModel> planets;
    for (const auto& r : *records) {
        planets.push_back(planet_from_json(r));
    }
    return PlanetCatalog(std::move(planets));
}

PlanetCatalog PlanetCatalog::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw CatalogError("cannot open planet catalog '" + path.string() + "'");
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw CatalogError(path.string() + ": " + e.what());
    }
    return parse(j);
}

std::filesystem::path PlanetCatalog::default_path()
{
    if (const char* env = std::getenv("AGASIM_CATALOG"); env != nullptr && *env != '\0') {
        return env;
    }
    return std::filesystem::path(AGASIM_DATA_DIR) / "planets.json";
}

PlanetCatalog PlanetCatalog::load_default() { return load(default_path()); }

const PlanetModel& PlanetCatalog::get(std::string_view name) const
{
    const std::string key = lower(name);
    for (const auto& p : planets_) {
        if (lower(p.name) == key) {
            return p;
        }
    }
    throw CatalogError("unknown planet '" + std::string(name) + "'");
}

} // namespace agasim
