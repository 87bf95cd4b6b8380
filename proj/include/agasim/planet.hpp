#ifndef AGASIM_PLANET_HPP
#define AGASIM_PLANET_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace agasim {

inline constexpr double kAvogadro = 6.02214076e23; // 1/mol

class CatalogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Physical constants of the secondary body (the Sun is always the primary).
///
/// Canonical units are fixed per planet: 1 DU is the planet's orbital semi-major
/// axis, 1 TU is the orbital period over 2*pi, and the Sun + planet mass is 1.
struct PlanetModel {
    std::string name;
    double mass_ratio = 0.0;            // m_planet / (m_sun + m_planet)
    double semi_major_axis_km = 0.0;    // 1 DU
    double orbital_period_s = 0.0;      // 2*pi TU
    double radius_km = 0.0;
    double surface_density_kg_m3 = 0.0; // may be 0 for an airless body
    double scale_height_km = 0.0;
    double molecular_weight_kg_mol = 0.0;
    double kinetic_diameter_m = 0.0;

    double du_km() const { return semi_major_axis_km; }
    double tu_s() const;
    double vu_km_s() const { return du_km() / tu_s(); }
    /// Canonical acceleration unit DU/TU^2 expressed in m/s^2.
    double accel_unit_m_s2() const;
    /// Sphere-of-influence radius (m_p/m_sun)^(2/5) in DU.
    double soi_radius_du() const;
    /// Gravitational parameter of the planet in km^3/s^2.
    double gm_km3_s2() const;

    /// Throws CatalogError naming the first field that violates an invariant.
    void validate() const;
    bool operator==(const PlanetModel&) const = default;
};

PlanetModel planet_from_json(const nlohmann::json& j);
nlohmann::json planet_to_json(const PlanetModel& p);

class PlanetCatalog {
public:
    PlanetCatalog() = default;
    explicit PlanetCatalog(std::vector<PlanetModel> planets);

    static PlanetCatalog load(const std::filesystem::path& path);
    static PlanetCatalog parse(const nlohmann::json& j);
    /// Catalog shipped with the project (data/planets.json), located through
    /// AGASIM_CATALOG or the install-time default path.
    static PlanetCatalog load_default();
    static std::filesystem::path default_path();

    /// Case-insensitive lookup by name.
    const PlanetModel& get(std::string_view name) const;
    const std::vector<PlanetModel>& planets() const { return planets_; }

private:
    std::vector<PlanetModel> planets_;
};

} // namespace agasim

#endif
