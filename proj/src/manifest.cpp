#include "agasim/manifest.hpp"

#include <fstream>
#include <map>

#include <boost/version.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include "agasim/config.hpp"
#include "agasim/csv.hpp"

#ifndef AGASIM_VERSION
#define AGASIM_VERSION "0.0.0"
#endif

namespace agasim {

std::string_view agasim_version() { return AGASIM_VERSION; }

std::string sha256_hex(std::string_view data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    std::string hex;
    for (unsigned int i = 0; i < length; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

namespace {

nlohmann::json hashed_config(const SweepGrid& grid)
{
    nlohmann::json j = config_to_json(grid);
    j.erase("workers");
    j.erase("output_dir");
    return j;
}

nlohmann::json optional_json(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json();
}

} // namespace

std::string sweep_config_hash(const SweepGrid& grid) { return sha256_hex(hashed_config(grid).dump()); }

nlohmann::json build_manifest(const SweepGrid& grid, const SweepTable& table,
                              const std::vector<std::filesystem::path>& files)
{
    std::map<std::string, std::size_t> counts;
    for (const SweepCell& c : table.cells) {
        ++counts[std::string(to_string(c.result.status))];
    }
    std::map<std::string, std::size_t> baseline_counts;
    for (const BaselineCell& b : table.baselines) {
        ++baseline_counts[std::string(to_string(b.result.status))];
    }

    nlohmann::json highlights = nlohmann::json::array();
    for (const SweepHighlight& h : sweep_highlights(grid, table)) {
        highlights.push_back({
            {"psi_deg", h.psi_deg},
            {"kind", std::string(to_string(h.kind))},
            {"min_ld", h.min_ld},
            {"lowest_ok_altitude_km", optional_json(h.lowest_ok_altitude_km)},
            {"turn_angle_gain_deg", optional_json(h.turn_angle_gain_deg)},
            {"voe_gain_km2_s2", optional_json(h.voe_gain_km2_s2)},
            {"max_tof_band_s", optional_json(h.max_tof_band_s)},
        });
    }

    nlohmann::json names = nlohmann::json::array();
    for (const auto& f : files) {
        names.push_back(f.filename().string());
    }

    return {
        {"tool", "agasim"},
        {"version", std::string(agasim_version())},
        {"config", hashed_config(grid)},
        {"config_sha256", sweep_config_hash(grid)},
        {"planet", planet_to_json(grid.base.planet)},
        {"libraries",
         {
             {"fmt", fmt::format("{}.{}.{}", FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100)},
             {"boost", BOOST_LIB_VERSION},
             {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                           NLOHMANN_JSON_VERSION_PATCH)},
             {"openssl", OPENSSL_VERSION_TEXT},
         }},
        {"color_map", "HSV hue 270 deg (violet, minimum) to 0 deg (red, maximum), saturation 1, value 1; "
                      "white marks cells without a value"},
        {"normalization", "per figure: linear between the minimum and maximum of the Ok cells of that "
                          "(metric, psi, kind) map"},
        {"cells", table.cells.size()},
        {"status_counts", counts},
        {"baseline_status_counts", baseline_counts},
        {"highlights", std::move(highlights)},
        {"files", std::move(names)},
    };
}

std::filesystem::path write_manifest(const nlohmann::json& manifest, const std::filesystem::path& out_dir)
{
    const auto path = out_dir / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ExportError("cannot open '" + path.string() + "' for writing");
    }
    out << manifest.dump(2) << '\n';
    if (!out) {
        throw ExportError("write to '" + path.string() + "' failed");
    }
    return path;
}

} // namespace agasim
