#ifndef AGASIM_CLI_HPP
#define AGASIM_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "agasim/config.hpp"
#include "agasim/sweep.hpp"

namespace agasim {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2 };

/// Writes results.csv, one heatmap per (metric, psi, kind) and manifest.json
/// into out_dir; returns every written path.
std::vector<std::filesystem::path> write_sweep_outputs(const SweepGrid& grid, const SweepTable& table,
                                                       const std::filesystem::path& out_dir);

/// Command-line entry point; `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace agasim

#endif
