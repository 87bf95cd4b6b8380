#include "agasim/cli.hpp"

#include <fstream>
#include <ostream>
#include <variant>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "agasim/csv.hpp"
#include "agasim/heatmap.hpp"
#include "agasim/manifest.hpp"

namespace agasim {

std::vector<std::filesystem::path> write_sweep_outputs(const SweepGrid& grid, const SweepTable& table,
                                                       const std::filesystem::path& out_dir)
{
    std::vector<std::filesystem::path> files;
    files.push_back(write_csv(table, out_dir));
    for (std::string_view metric : kHeatmapMetrics) {
        for (auto& p : render_heatmap(table, metric, out_dir)) {
            files.push_back(std::move(p));
        }
    }
    files.push_back(write_manifest(build_manifest(grid, table, files), out_dir));
    return files;
}

namespace {

/// Failure that is not the user's fault; maps to kExitRuntime.
class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

PlanetCatalog open_catalog(const std::string& path)
{
    return path.empty() ? PlanetCatalog::load_default() : PlanetCatalog::load(path);
}

int cmd_run(const PlanetCatalog& catalog, const std::string& config_path, const std::string& out_path,
            bool samples, std::ostream& out)
{
    const ResolvedConfig resolved = load_config(config_path, catalog);
    const auto* config = std::get_if<ManeuverConfig>(&resolved);
    if (config == nullptr) {
        throw ConfigError(config_path + ": describes a sweep; use the 'sweep' subcommand");
    }
    RunOptions options;
    options.keep_samples = samples;
    const TrajectoryResult result = run_maneuver(*config, options);
    nlohmann::json doc = {{"config", config_to_json(*config)}, {"result", result_to_json(result, samples)}};
    if (out_path.empty()) {
        out << doc.dump(2) << '\n';
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f || !(f << doc.dump(2) << '\n')) {
            throw RuntimeFailure("cannot write '" + out_path + "'");
        }
    }
    return result.status == Status::step_failure ? kExitRuntime : kExitOk;
}

int cmd_sweep(const PlanetCatalog& catalog, const std::string& config_path, std::string out_dir, unsigned workers,
              std::ostream& out)
{
    const ResolvedConfig resolved = load_config(config_path, catalog);
    const auto* parsed = std::get_if<SweepGrid>(&resolved);
    if (parsed == nullptr) {
        throw ConfigError(config_path + ": describes a single run; use the 'run' subcommand");
    }
    SweepGrid grid = *parsed;
    if (workers > 0) {
        grid.workers = workers;
    }
    if (out_dir.empty()) {
        out_dir = grid.output_dir;
    }
    if (out_dir.empty()) {
        throw ConfigError("no output directory: pass --out or set 'output_dir'");
    }
    const SweepTable table = run_sweep(grid);
    const auto files = write_sweep_outputs(grid, table, out_dir);
    fmt::print(out, "{} cells, {} files written to {}\n", table.cells.size(), files.size(), out_dir);
    return kExitOk;
}

int cmd_planets(const PlanetCatalog& catalog, std::ostream& out)
{
    fmt::print(out, "{:<8} {:>12} {:>14} {:>10} {:>12} {:>8} {:>10} {:>10}\n", "name", "mu", "a_km", "R_km",
               "rho0_kg_m3", "H_km", "soi_km", "vu_km_s");
    for (const PlanetModel& p : catalog.planets()) {
        fmt::print(out, "{:<8} {:>12.5e} {:>14.6e} {:>10.1f} {:>12.4g} {:>8.2f} {:>10.0f} {:>10.4f}\n", p.name,
                   p.mass_ratio, p.semi_major_axis_km, p.radius_km, p.surface_density_kg_m3, p.scale_height_km,
                   p.soi_radius_du() * p.du_km(), p.vu_km_s());
    }
    return kExitOk;
}

int cmd_bands(const PlanetCatalog& catalog, const std::string& planet, double length_m, std::ostream& out)
{
    const PlanetModel& p = catalog.get(planet);
    SpacecraftModel craft;
    craft.reference_length_m = length_m;
    craft.validate();
    const BandAltitudes band = band_altitudes(p, craft);
    fmt::print(out, "{}: Kn = 1e-3 at {:.3f} km, Kn = 1e-2 at {:.3f} km (l = {:g} m)\n", p.name, band.floor_km,
               band.ceiling_km, length_m);
    return kExitOk;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Aero-gravity-assist flyby simulator in the planar restricted three-body problem", "agasim"};
    app.require_subcommand(1);
    std::string catalog_path;
    app.add_option("--catalog", catalog_path, "Planet catalog JSON (default: bundled data/planets.json)");

    std::string config_path;
    std::string out_path;
    bool samples = false;
    unsigned workers = 0;
    std::string planet;
    double length_m = SpacecraftModel{}.reference_length_m;

    auto* run = app.add_subcommand("run", "Propagate one trajectory and print its metrics as JSON");
    run->add_option("--config", config_path, "Single-run config JSON")->required();
    run->add_option("--out", out_path, "Write the JSON result here instead of stdout");
    run->add_flag("--samples", samples, "Include the forward-leg state samples");

    auto* sweep = app.add_subcommand("sweep", "Run an altitude x L/D sweep and write CSV, SVG maps and a manifest");
    sweep->add_option("--config", config_path, "Sweep config JSON")->required();
    sweep->add_option("--out", out_path, "Output directory");
    sweep->add_option("--workers", workers, "Override the worker count")->check(CLI::PositiveNumber);

    auto* planets = app.add_subcommand("planets", "Print the planet catalog");

    auto* bands = app.add_subcommand("bands", "Print the analysis-band altitudes (1e-3 <= Kn <= 1e-2)");
    bands->add_option("--planet", planet, "Planet id")->required();
    bands->add_option("--length-m", length_m, "Reference length for the Knudsen number (m)")
        ->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    try {
        const PlanetCatalog catalog = open_catalog(catalog_path);
        if (run->parsed()) return cmd_run(catalog, config_path, out_path, samples, out);
        if (sweep->parsed()) return cmd_sweep(catalog, config_path, out_path, workers, out);
        if (planets->parsed()) return cmd_planets(catalog, out);
        return cmd_bands(catalog, planet, length_m, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n\n" << config_schema_help();
        return kExitConfig;
    } catch (const CatalogError& e) {
        err << "catalog error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "runtime failure: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace agasim
