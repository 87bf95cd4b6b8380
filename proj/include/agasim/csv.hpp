#ifndef AGASIM_CSV_HPP
#define AGASIM_CSV_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "agasim/sweep.hpp"

namespace agasim {

inline constexpr const char* kCsvHeader =
    "planet,kind,psi_deg,altitude_km,signed_ld,aoa_deg,bank_deg,status,voe_km2_s2,turn_angle_deg,tof_band_s,"
    "actual_peri_alt_km,actual_psi_deg,delta_v_km_s,voe_contrib_pct,delta_contrib_pct";

class ExportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One line of results.csv. Metric fields are empty for non-Ok cells and for
/// contributions that are undefined.
struct CsvRow {
    std::string planet;
    std::string kind;
    double psi_deg = 0.0;
    double altitude_km = 0.0;
    double signed_ld = 0.0;
    double aoa_deg = 0.0;
    double bank_deg = 0.0;
    std::string status;
    std::optional<double> voe_km2_s2;
    std::optional<double> turn_angle_deg;
    std::optional<double> tof_band_s;
    std::optional<double> actual_peri_alt_km;
    std::optional<double> actual_psi_deg;
    std::optional<double> delta_v_km_s;
    std::optional<double> voe_contrib_pct;
    std::optional<double> delta_contrib_pct;

    bool operator==(const CsvRow&) const = default;
};

std::vector<CsvRow> csv_rows(const SweepTable& table);

/// Header plus one LF-terminated line per row; numbers in %.17e.
std::string csv_text(const std::vector<CsvRow>& rows);

/// Writes out_dir/results.csv, creating the directory if needed.
std::filesystem::path write_csv(const SweepTable& table, const std::filesystem::path& out_dir);

std::vector<CsvRow> parse_csv(const std::string& text);
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

} // namespace agasim

#endif
