#include <algorithm>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "agasim/cli.hpp"
#include "agasim/csv.hpp"
#include "agasim/heatmap.hpp"
#include "agasim/manifest.hpp"
#include "agasim/sweep.hpp"
#include "test_support.hpp"

using namespace agasim;
using agasim::test::catalog;
using nlohmann::json;

namespace {

SweepGrid small_grid(unsigned workers)
{
    SweepGrid g;
    g.base.planet = catalog().get("venus");
    g.altitude_min_km = 240.0;
    g.altitude_max_km = 250.0;
    g.altitude_step_km = 5.0;
    g.ld_values = {-2.0, 0.0, 2.0};
    g.workers = workers;
    return g;
}

const SweepTable& small_table()
{
    static const SweepTable t = run_sweep(small_grid(1));
    return t;
}

std::filesystem::path fresh_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("agasim_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t count(const std::string& haystack, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

SweepTable uniform_table(std::size_t n_alt, std::size_t n_ld, double value)
{
    SweepTable t;
    t.planet = "venus";
    for (std::size_t i = 0; i < n_alt; ++i) {
        for (std::size_t j = 0; j < n_ld; ++j) {
            SweepCell c;
            c.kind = ManeuverKind::agam;
            c.psi_deg = 90.0;
            c.altitude_km = 230.0 + static_cast<double>(i);
            c.signed_ld = -1.0 + static_cast<double>(j);
            c.result.status = Status::ok;
            c.result.voe_km2_s2 = value;
            t.cells.push_back(c);
        }
    }
    return t;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli_main(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

} // namespace

TEST(Sweep, CellCountAndOrder)
{
    const SweepTable& t = small_table();
    // 3 altitudes x 3 L/D x 2 psi x 2 kinds, plus one baseline per (altitude, psi).
    EXPECT_EQ(t.cells.size(), 3u * 3u * 2u * 2u);
    EXPECT_EQ(t.baselines.size(), 3u * 2u);
    EXPECT_TRUE(std::is_sorted(t.cells.begin(), t.cells.end(), [](const SweepCell& a, const SweepCell& b) {
        return a.altitude_km != b.altitude_km ? a.altitude_km < b.altitude_km : a.signed_ld < b.signed_ld;
    }));
    for (const SweepCell& c : t.cells) {
        EXPECT_NE(t.baseline(c.altitude_km, c.psi_deg), nullptr);
    }
}

TEST(Sweep, FullVenusGridArithmetic)
{
    const auto g = std::get<SweepGrid>(parse_config(json::parse(R"({"planet":"venus","workers":1})"), catalog()));
    EXPECT_EQ(g.altitudes().size() * g.ld_values.size() * g.psi_list.size() * g.kinds.size(), 41u * 41u * 2u * 2u);
    EXPECT_EQ(g.altitudes().size() * g.psi_list.size(), 41u * 2u);
}

TEST(Sweep, IndependentOfWorkerCount)
{
    const SweepTable parallel = run_sweep(small_grid(3));
    EXPECT_EQ(csv_text(csv_rows(parallel)), csv_text(csv_rows(small_table())));
}

TEST(Sweep, SingleCellReproducesRunManeuver)
{
    SweepGrid g = small_grid(1);
    g.altitude_max_km = g.altitude_min_km;
    g.ld_values = {-2.0};
    g.psi_list = {270.0};
    g.kinds = {ManeuverKind::pagam};
    const SweepTable t = run_sweep(g);
    ASSERT_EQ(t.cells.size(), 1u);
    const TrajectoryResult direct = run_maneuver(cell_config(g, ManeuverKind::pagam, 270.0, 240.0, -2.0));
    EXPECT_EQ(result_to_json(t.cells[0].result).dump(), result_to_json(direct).dump());
}

TEST(Sweep, CellsAreIndependent)
{
    SweepGrid g = small_grid(1);
    g.ld_values = {2.0};
    const SweepTable subset = run_sweep(g);
    for (const SweepCell& c : subset.cells) {
        const auto it = std::find_if(small_table().cells.begin(), small_table().cells.end(), [&](const SweepCell& d) {
            return d.altitude_km == c.altitude_km && d.signed_ld == c.signed_ld && d.psi_deg == c.psi_deg &&
                   d.kind == c.kind;
        });
        ASSERT_NE(it, small_table().cells.end());
        EXPECT_EQ(result_to_json(it->result).dump(), result_to_json(c.result).dump());
    }
}

TEST(Sweep, ContributionsUseBaseline)
{
    for (const SweepCell& c : small_table().cells) {
        const BaselineCell* b = small_table().baseline(c.altitude_km, c.psi_deg);
        ASSERT_NE(b, nullptr);
        if (c.result.status == Status::ok && b->result.status == Status::ok) {
            ASSERT_TRUE(c.contribution.delta_pct.has_value());
            EXPECT_NEAR(*c.contribution.delta_pct,
                        100.0 * (c.result.turn_angle_deg - b->result.turn_angle_deg) / b->result.turn_angle_deg,
                        1e-12);
        }
    }
}

TEST(ParallelFor, PropagatesExceptionsAfterJoin)
{
    std::vector<int> hits(100, 0);
    EXPECT_THROW(parallel_for(100, 4,
                              [&](std::size_t i) {
                                  hits[i] = 1;
                                  if (i == 17) throw std::runtime_error("cell 17");
                              }),
                 std::runtime_error);
    EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 100);
}

TEST(Csv, EmptyTableIsHeaderOnly)
{
    EXPECT_EQ(csv_text({}), std::string(kCsvHeader) + "\n");
}

TEST(Csv, SingleOkCellIsTwoLines)
{
    SweepTable t = uniform_table(1, 1, -12.5);
    const std::string text = csv_text(csv_rows(t));
    EXPECT_EQ(count(text, "\n"), 2u);
    EXPECT_EQ(text.find('\r'), std::string::npos);
    EXPECT_NE(text.find("-1.25000000000000000e+01"), std::string::npos);
}

TEST(Csv, NonOkCellsHaveEmptyMetrics)
{
    for (const CsvRow& r : csv_rows(small_table())) {
        if (r.status != "ok") {
            EXPECT_FALSE(r.voe_km2_s2 || r.turn_angle_deg || r.tof_band_s || r.actual_peri_alt_km ||
                         r.actual_psi_deg || r.delta_v_km_s || r.voe_contrib_pct || r.delta_contrib_pct);
        } else {
            EXPECT_TRUE(r.voe_km2_s2 && r.turn_angle_deg && r.tof_band_s && r.delta_v_km_s);
        }
    }
}

TEST(Csv, FileRoundTripIsLossless)
{
    const auto dir = fresh_dir("csv");
    const auto path = write_csv(small_table(), dir);
    EXPECT_EQ(path.filename(), "results.csv");
    EXPECT_EQ(read_csv(path), csv_rows(small_table()));
    EXPECT_THROW(parse_csv("planet,kind\n"), ExportError);
}

TEST(Heatmap, RainbowEndpoints)
{
    EXPECT_EQ(rainbow_color(0.0), "#8000ff");
    EXPECT_EQ(rainbow_color(1.0), "#ff0000");
    EXPECT_EQ(rainbow_color(1.0 / 9.0), "#0000ff");
    EXPECT_EQ(rainbow_color(5.0 / 9.0), "#00ff00");
    EXPECT_EQ(rainbow_color(-1.0), "#8000ff");
}

TEST(Heatmap, UniformValuesGiveSingleHue)
{
    const SweepTable t = uniform_table(3, 2, 7.0);
    const std::string svg = render_heatmap_svg(t, "voe_km2_s2", 90.0, ManeuverKind::agam);
    const std::regex cell_fill("class=\"cell\"[^>]*fill=\"(#[0-9a-f]{6})\"");
    std::set<std::string> fills;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), cell_fill); it != std::sregex_iterator(); ++it) {
        fills.insert((*it)[1]);
    }
    EXPECT_EQ(fills.size(), 1u);
    EXPECT_NE(svg.find("max 7<"), std::string::npos);
    EXPECT_NE(svg.find("min 7<"), std::string::npos);
}

TEST(Heatmap, OneFlaggedCellIsOneWhiteRectangle)
{
    SweepTable t = uniform_table(3, 3, 1.0);
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
        t.cells[i].result.voe_km2_s2 = static_cast<double>(i);
    }
    t.cells[4].result.status = Status::below_band;
    const std::string svg = render_heatmap_svg(t, "voe_km2_s2", 90.0, ManeuverKind::agam);
    EXPECT_EQ(count(svg, "class=\"cell\""), 9u);
    EXPECT_EQ(count(svg, "fill=\"#ffffff\""), 1u);
}

TEST(Heatmap, DeterministicAndFileNames)
{
    const auto dir = fresh_dir("svg");
    const auto first = render_heatmap(small_table(), "turn_angle_deg", dir);
    ASSERT_EQ(first.size(), 4u);
    EXPECT_EQ(first[0].filename(), "heatmap_turn_angle_deg_90_agam.svg");
    const std::string a = slurp(first[0]);
    render_heatmap(small_table(), "turn_angle_deg", dir);
    EXPECT_EQ(slurp(first[0]), a);
    EXPECT_THROW(render_heatmap(small_table(), "bogus", dir), UnknownMetricError);
}

TEST(Manifest, HashIgnoresWorkersAndRecordsHighlights)
{
    EXPECT_EQ(sweep_config_hash(small_grid(1)), sweep_config_hash(small_grid(8)));
    SweepGrid other = small_grid(1);
    other.altitude_step_km = 2.5;
    EXPECT_NE(sweep_config_hash(small_grid(1)), sweep_config_hash(other));
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const json m = build_manifest(small_grid(1), small_table(), {});
    EXPECT_EQ(m.at("highlights").size(), 4u);
    EXPECT_EQ(m.at("cells"), small_table().cells.size());
    EXPECT_TRUE(m.at("normalization").is_string());
}

TEST(Cli, BandsForMars)
{
    std::string out;
    EXPECT_EQ(cli({"bands", "--planet", "mars"}, &out), kExitOk);
    EXPECT_NE(out.find("72.2"), std::string::npos) << out;
    EXPECT_NE(out.find("97.8"), std::string::npos) << out;
}

TEST(Cli, RunGravityAssistBehindPlanet)
{
    const auto dir = fresh_dir("cli_run");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "gam.json") << R"({"planet":"venus","kind":"gam","psi_deg":270,"pericenter_altitude_km":250})";
    std::string out;
    ASSERT_EQ(cli({"run", "--config", (dir / "gam.json").string()}, &out), kExitOk);
    const json j = json::parse(out);
    EXPECT_GT(j.at("result").at("voe_km2_s2").get<double>(), 0.0);
    EXPECT_EQ(j.at("result").at("status"), "ok");
}

TEST(Cli, ErrorsMapToExitCodes)
{
    std::string err;
    EXPECT_EQ(cli({"frobnicate"}, nullptr, &err), kExitConfig);
    EXPECT_NE(err.find("Usage"), std::string::npos);
    EXPECT_EQ(cli({"run"}), kExitConfig);
    EXPECT_EQ(cli({"run", "--config", "/nonexistent.json"}, nullptr, &err), kExitConfig);
    EXPECT_NE(err.find("planet"), std::string::npos);
    EXPECT_EQ(cli({"bands", "--planet", "pluto"}), kExitConfig);
    EXPECT_EQ(cli({"planets"}), kExitOk);
}

TEST(Cli, SweepWritesOutputs)
{
    const auto dir = fresh_dir("cli_sweep");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "sweep.json")
        << R"({"planet":"mars","altitude_km":{"min":80,"max":82,"step":1},"ld_list":[-1,1],"psi_list":[90],"kinds":["agam"],"workers":2})";
    ASSERT_EQ(cli({"sweep", "--config", (dir / "sweep.json").string(), "--out", (dir / "out").string()}), kExitOk);
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / "results.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / "heatmap_voe_km2_s2_90_agam.svg"));
    const json m = json::parse(slurp(dir / "out" / "manifest.json"));
    EXPECT_EQ(m.at("config_sha256").get<std::string>().size(), 64u);
    EXPECT_EQ(read_csv(dir / "out" / "results.csv").size(), 6u);
}
