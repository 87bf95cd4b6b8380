#include "agasim/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace agasim {

namespace {

std::optional<double> metric(double v)
{
    if (!std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::string number(double v) { return fmt::format("{:.17e}", v); }

std::string optional_number(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

double parse_number(const std::string& field, std::size_t line, const char* column)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != field.size()) {
        throw ExportError(fmt::format("results.csv line {}: column '{}' is not a number: '{}'", line, column, field));
    }
    return v;
}

std::optional<double> parse_optional(const std::string& field, std::size_t line, const char* column)
{
    if (field.empty()) {
        return std::nullopt;
    }
    return parse_number(field, line, column);
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) {
            return out;
        }
        start = comma + 1;
    }
}

} // namespace

std::vector<CsvRow> csv_rows(const SweepTable& table)
{
    std::vector<CsvRow> rows;
    rows.reserve(table.cells.size());
    for (const SweepCell& c : table.cells) {
        const TrajectoryResult& r = c.result;
        CsvRow row;
        row.planet = table.planet;
        row.kind = std::string(to_string(c.kind));
        row.psi_deg = c.psi_deg;
        row.altitude_km = c.altitude_km;
        row.signed_ld = c.signed_ld;
        row.aoa_deg = r.aoa_deg;
        row.bank_deg = r.bank_deg;
        row.status = std::string(to_string(r.status));
        if (r.status == Status::ok) {
            row.voe_km2_s2 = metric(r.voe_km2_s2);
            row.turn_angle_deg = metric(r.turn_angle_deg);
            row.tof_band_s = metric(r.tof_band_s);
            row.actual_peri_alt_km = metric(r.actual_pericenter_altitude_km);
            row.actual_psi_deg = metric(r.actual_approach_angle_deg);
            row.delta_v_km_s = metric(r.delta_v_km_s);
            row.voe_contrib_pct = c.contribution.voe_pct;
            row.delta_contrib_pct = c.contribution.delta_pct;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_text(const std::vector<CsvRow>& rows)
{
    std::string out = kCsvHeader;
    out += '\n';
    for (const CsvRow& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.planet, r.kind, number(r.psi_deg),
                           number(r.altitude_km), number(r.signed_ld), number(r.aoa_deg), number(r.bank_deg),
                           r.status, optional_number(r.voe_km2_s2), optional_number(r.turn_angle_deg),
                           optional_number(r.tof_band_s), optional_number(r.actual_peri_alt_km),
                           optional_number(r.actual_psi_deg), optional_number(r.delta_v_km_s),
                           optional_number(r.voe_contrib_pct), optional_number(r.delta_contrib_pct));
    }
    return out;
}

std::filesystem::path write_csv(const SweepTable& table, const std::filesystem::path& out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw ExportError("cannot create directory '" + out_dir.string() + "': " + ec.message());
    }
    const auto path = out_dir / "results.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ExportError("cannot open '" + path.string() + "' for writing");
    }
    out << csv_text(csv_rows(table));
    if (!out) {
        throw ExportError("write to '" + path.string() + "' failed");
    }
    return path;
}

std::vector<CsvRow> parse_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw ExportError("results.csv: missing or unexpected header");
    }
    std::vector<CsvRow> rows;
    std::size_t number_of_line = 1;
    while (std::getline(in, line)) {
        ++number_of_line;
        const auto f = split(line);
        if (f.size() != 16) {
            throw ExportError(fmt::format("results.csv line {}: expected 16 fields, got {}", number_of_line, f.size()));
        }
        const std::size_t n = number_of_line;
        CsvRow r;
        r.planet = f[0];
        r.kind = f[1];
        r.psi_deg = parse_number(f[2], n, "psi_deg");
        r.altitude_km = parse_number(f[3], n, "altitude_km");
        r.signed_ld = parse_number(f[4], n, "signed_ld");
        r.aoa_deg = parse_number(f[5], n, "aoa_deg");
        r.bank_deg = parse_number(f[6], n, "bank_deg");
        r.status = f[7];
        r.voe_km2_s2 = parse_optional(f[8], n, "voe_km2_s2");
        r.turn_angle_deg = parse_optional(f[9], n, "turn_angle_deg");
        r.tof_band_s = parse_optional(f[10], n, "tof_band_s");
        r.actual_peri_alt_km = parse_optional(f[11], n, "actual_peri_alt_km");
        r.actual_psi_deg = parse_optional(f[12], n, "actual_psi_deg");
        r.delta_v_km_s = parse_optional(f[13], n, "delta_v_km_s");
        r.voe_contrib_pct = parse_optional(f[14], n, "voe_contrib_pct");
        r.delta_contrib_pct = parse_optional(f[15], n, "delta_contrib_pct");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<CsvRow> read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ExportError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str());
}

} // namespace agasim
