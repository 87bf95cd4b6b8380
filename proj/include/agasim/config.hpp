#ifndef AGASIM_CONFIG_HPP
#define AGASIM_CONFIG_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "agasim/maneuver.hpp"
#include "agasim/planet.hpp"

namespace agasim {

/// Malformed, mistyped or out-of-range configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Altitude x signed-L/D grid swept for every (psi, kind) pair.
struct SweepGrid {
    /// Planet, spacecraft, pericenter speed, velocity sense, thrust mode and
    /// integrator shared by every cell; kind, psi, altitude and L/D are overridden.
    ManeuverConfig base;
    std::vector<ManeuverKind> kinds{ManeuverKind::agam, ManeuverKind::pagam};
    std::vector<double> psi_list{90.0, 270.0};
    double altitude_min_km = 0.0;
    double altitude_max_km = 0.0;
    double altitude_step_km = 1.0;
    std::vector<double> ld_values;
    std::string output_dir;
    unsigned workers = 1;

    /// min + i * step for every i with the value not exceeding max (1e-9 km slack).
    std::vector<double> altitudes() const;
    void validate() const;
    bool operator==(const SweepGrid&) const = default;
};

using ResolvedConfig = std::variant<ManeuverConfig, SweepGrid>;

/// Evenly spaced values from min to max inclusive; symmetric ranges yield exact zeros.
std::vector<double> linspace(double min, double max, int count);

/// Default sweep window for a planet: 230-270 km for Venus, 70-100 km for
/// Mars, otherwise the analysis band rounded outward to whole kilometres.
struct AltitudeWindow {
    double min_km;
    double max_km;
};
AltitudeWindow default_altitude_window(const PlanetModel& planet, const SpacecraftModel& craft);

/// A document is a sweep when `altitude_km` is an object or any of `ld_list`,
/// `psi_list`, `kinds`, `workers`, `output_dir` is present or `ld` is an object.
ResolvedConfig parse_config(const nlohmann::json& j, const PlanetCatalog& catalog);
ResolvedConfig load_config(const std::filesystem::path& path, const PlanetCatalog& catalog);

/// Fully resolved form; parsing it back yields an equal configuration.
nlohmann::json config_to_json(const ManeuverConfig& config);
nlohmann::json config_to_json(const SweepGrid& grid);
nlohmann::json config_to_json(const ResolvedConfig& config);

/// Human-readable schema summary printed on usage errors.
std::string config_schema_help();

} // namespace agasim

#endif
