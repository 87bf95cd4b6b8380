#ifndef AGASIM_MANIFEST_HPP
#define AGASIM_MANIFEST_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "agasim/sweep.hpp"

namespace agasim {

/// Project version compiled into the library.
std::string_view agasim_version();

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Hash of the resolved sweep config without `workers` and `output_dir`,
/// which do not affect results.
std::string sweep_config_hash(const SweepGrid& grid);

/// Manifest describing one sweep: config and hash, planet record, library
/// versions, color normalization, status counts and highlights. It holds no
/// timestamps or worker counts, so identical sweeps give identical bytes.
nlohmann::json build_manifest(const SweepGrid& grid, const SweepTable& table,
                              const std::vector<std::filesystem::path>& files);

std::filesystem::path write_manifest(const nlohmann::json& manifest, const std::filesystem::path& out_dir);

} // namespace agasim

#endif
