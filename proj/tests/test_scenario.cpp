#include <catch_amalgamated.hpp>

#include <polarispec/scenario.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace polarispec;
using Catch::Approx;
namespace fs = std::filesystem;

namespace
{
fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("polarispec_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

double max_diff(const RealSpectrum& a, const RealSpectrum& b)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

double max_diff(const TraSpectra& a, const TraSpectra& b)
{
    return std::max({max_diff(a.transmission(), b.transmission()), max_diff(a.reflection(), b.reflection()),
                     max_diff(a.absorption(), b.absorption())});
}

std::string error_of(const json& j)
{
    try {
        parse_scenario(j);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

int cli(const std::string& args)
{
    const std::string cmd = std::string("\"") + POLARISPEC_CLI_PATH + "\" " + args;
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
} // namespace

TEST_CASE("config validation names the offending key", "[scenario][config]")
{
    auto j = preset_json("fig2a");
    j["cavity"]["kapa_L"] = 0.1;
    REQUIRE_THAT(error_of(j), Catch::Matchers::ContainsSubstring("unknown key 'cavity.kapa_L'"));

    j = preset_json("fig2a");
    j["colour"] = "red";
    REQUIRE_THAT(error_of(j), Catch::Matchers::ContainsSubstring("unknown key 'colour'"));

    j = preset_json("fig2a");
    j["model"].erase("gamma");
    REQUIRE_THAT(error_of(j), Catch::Matchers::ContainsSubstring("missing key 'model.gamma'"));

    j = preset_json("fig2a");
    j["model"]["type"] = "quantum_dot";
    REQUIRE_FALSE(error_of(j).empty());

    j = preset_json("fig2a");
    j["model"]["beta"] = "hot";
    REQUIRE_FALSE(error_of(j).empty());

    j = preset_json("fig2a");
    j["grid"]["n_points"] = 1;
    REQUIRE_FALSE(error_of(j).empty());

    j = preset_json("fig5a");
    j["model"]["populations"] = {0.5, 0.2, 0.1};
    REQUIRE_FALSE(error_of(j).empty());

    REQUIRE_THROWS_AS(parse_json_text("{\"cavity\": ", "broken.json"), ValidationError);
    REQUIRE_THROWS_AS(preset("fig9"), ValidationError);
}

TEST_CASE("presets round trip through JSON and run quickly", "[scenario][presets]")
{
    REQUIRE(preset_names().size() == 9);
    for (const auto& name : preset_names()) {
        INFO(name);
        const auto start = std::chrono::steady_clock::now();
        const auto s = preset(name);
        const auto direct = compute_scenario(s);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        REQUIRE(seconds < 5.0);

        const auto again = parse_scenario(to_json(s));
        REQUIRE(to_json(again) == to_json(s));
        REQUIRE(max_diff(compute_scenario(again).spectra, direct.spectra) == 0.0);
        REQUIRE(parse_scenario(parse_json_text(to_json(s).dump(2), name)).grid == s.grid);
    }
}

TEST_CASE("empty cavity and saturated three-level preset", "[scenario]")
{
    const auto empty = compute_scenario(preset("empty_cavity"));
    const auto& grid = empty.spectra.transmission().grid();
    const std::size_t centre = grid.size() / 2;
    REQUIRE(grid[centre] == 0.0);
    REQUIRE(empty.spectra.transmission()[centre] == Approx(1.0).epsilon(1e-12));

    // Equal populations cancel every transition: identical to a bare cavity.
    const auto saturated = preset("fig5c");
    auto bare = preset("empty_cavity");
    bare.cavity = saturated.cavity;
    bare.grid = saturated.grid;
    REQUIRE(max_diff(compute_scenario(saturated).spectra, compute_scenario(bare).spectra) < 1e-12);
}

TEST_CASE("temperature sweep contracts the splitting", "[scenario][sweep]")
{
    const auto sw = parse_sweep(json::parse(R"({
        "base_preset": "fig2b",
        "parameter": "model.beta",
        "values": ["inf", 8.0, 4.0, 2.0, 1.0, 0.5, 0.25, 0.0]
    })"));
    const auto points = run_sweep(sw);
    REQUIRE(points.size() == 8);
    REQUIRE(std::isinf(points[0].summary_value));
    for (std::size_t k = 0; k + 1 < points.size(); ++k)
        REQUIRE(points[k + 1].peak_splitting <= points[k].peak_splitting);
    REQUIRE(points.back().peak_count == 1);
    REQUIRE(points.back().peak_splitting == 0.0);
    REQUIRE(points[0].peak_count == 2);
}

TEST_CASE("single-value sweep equals a plain run", "[scenario][sweep]")
{
    const auto sw = parse_sweep(json::parse(R"({
        "base_preset": "fig3a", "parameter": "model.disorder.sigma", "values": [1.0]
    })"));
    const auto points = run_sweep(sw);
    REQUIRE(points.size() == 1);
    REQUIRE(max_diff(points[0].spectra, compute_scenario(preset("fig3a")).spectra) == 0.0);
}

TEST_CASE("population sweep over three-level systems", "[scenario][sweep]")
{
    const auto dir = scratch("populations");
    json doc = json::parse(R"({
        "description": "saturation series",
        "base_preset": "fig5a",
        "parameter": "model.populations",
        "values": [[0.7, 0.2, 0.1], [0.48, 0.48, 0.04],
                   [0.3333333333333333, 0.3333333333333333, 0.3333333333333333]]
    })");
    doc["summary_csv"] = (dir / "summary.csv").string();
    doc["output_dir"] = (dir / "spectra").string();
    const auto points = run_sweep(parse_sweep(doc));
    REQUIRE(points.size() == 3);
    REQUIRE(points[0].peak_count == 4);
    REQUIRE(points[1].peak_count == 3);
    REQUIRE(points[2].peak_count == 1);
    REQUIRE(points[2].summary_value == 2.0);

    const auto summary = parse_csv(read_file(dir / "summary.csv"), {"value", "peak_splitting"}, "summary");
    REQUIRE(summary.rows.size() == 3);
    REQUIRE(summary.rows[1][0] == 1.0);
    REQUIRE(summary.rows[1][1] == points[1].peak_splitting);
    for (int k = 0; k < 3; ++k)
        REQUIRE(fs::exists(dir / "spectra" / ("sweep_" + std::to_string(k) + ".csv")));
}

TEST_CASE("sweep validation", "[scenario][sweep]")
{
    REQUIRE_THROWS_WITH(parse_sweep(json::parse(R"({"base_preset": "fig2a", "parameter": "model.temperature",
                                                    "values": [1.0]})")),
                        Catch::Matchers::ContainsSubstring("model.temperature"));
    REQUIRE_THROWS_AS(parse_sweep(json::parse(R"({"base_preset": "fig2a", "parameter": "model.g", "values": []})")),
                      ValidationError);
    REQUIRE_THROWS_AS(parse_sweep(json::parse(R"({"parameter": "model.g", "values": [1.0]})")), ValidationError);
    const auto sw = parse_sweep(json::parse(R"({"base_preset": "fig2a", "parameter": "model.gamma",
                                               "values": [0.3, -1.0]})"));
    REQUIRE_THROWS_WITH(run_sweep(sw), Catch::Matchers::ContainsSubstring("sweep value #1"));
}

TEST_CASE("bundle export", "[scenario][bundle]")
{
    const auto dir = scratch("bundle");
    std::ostringstream notices;
    const auto files = export_bundle(preset("fig2b"), dir / "a", notices);
    REQUIRE(files.size() == 4);
    REQUIRE(notices.str().empty());
    for (const char* f : {"chi.csv", "j_eff.csv", "beta_eff.csv", "spectra.csv"})
        REQUIRE(fs::exists(dir / "a" / f));

    // A thermal ensemble has beta_eff = beta everywhere above zero frequency.
    const auto beta = parse_csv(read_file(dir / "a" / "beta_eff.csv"), {"omega", "beta_eff"}, "beta");
    REQUIRE_FALSE(beta.rows.empty());
    for (const auto& row : beta.rows) {
        REQUIRE(row[0] > 0.0);
        REQUIRE(std::abs(row[1] - 1.0) < 1e-9);
    }

    // Same scenario, same bytes.
    export_bundle(preset("fig2b"), dir / "b", notices);
    for (const char* f : {"chi.csv", "j_eff.csv", "beta_eff.csv", "spectra.csv"})
        REQUIRE(read_file(dir / "a" / f) == read_file(dir / "b" / f));

    std::ostringstream tab_notices;
    const auto tab_files = export_bundle(preset("empty_cavity"), dir / "c", tab_notices);
    REQUIRE(tab_files.size() == 3);
    REQUIRE_THAT(tab_notices.str(), Catch::Matchers::ContainsSubstring("beta_eff.csv not written"));
    REQUIRE_FALSE(fs::exists(dir / "c" / "beta_eff.csv"));
}

TEST_CASE("tabulated chi round trip through a CSV file", "[scenario][bundle]")
{
    const auto dir = scratch("tabulated");
    const auto original = preset("fig4");
    std::ostringstream notices;
    REQUIRE(export_bundle(original, dir, notices).size() == 3);
    REQUIRE_THAT(notices.str(), Catch::Matchers::ContainsSubstring("rotating-frame"));

    json doc = to_json(original);
    doc["model"] = {{"type", "tabulated_chi"}, {"path", "chi.csv"}};
    write_file_atomic(dir / "scenario.json", doc.dump(2));
    const auto loaded = load_scenario(dir / "scenario.json");
    REQUIRE(max_diff(compute_scenario(loaded).spectra, compute_scenario(original).spectra) < 1e-12);
    REQUIRE(to_json(loaded)["model"]["path"] == "chi.csv");

    // Outside the tabulated range there is nothing to interpolate.
    auto wide = loaded;
    wide.grid = make_grid(-5.0, 5.0, 11);
    REQUIRE_THROWS_AS(compute_scenario(wide), ValidationError);
}

TEST_CASE("scenario outputs are written", "[scenario]")
{
    const auto dir = scratch("outputs");
    auto s = preset("fig2a");
    s.outputs.push_back({(dir / "nested" / "t.csv").string(), (dir / "t.svg").string()});
    const auto result = run_scenario(s);
    const auto table = parse_csv(read_file(dir / "nested" / "t.csv"), {"omega", "T", "R", "A"}, "t.csv");
    REQUIRE(table.rows.size() == s.grid.size());
    REQUIRE(table.rows[2000][1] == result.spectra.transmission()[2000]);
    REQUIRE_THAT(read_file(dir / "t.svg"), Catch::Matchers::ContainsSubstring("<svg"));
}

TEST_CASE("command line exit codes", "[scenario][cli]")
{
    const auto dir = scratch("cli");
    const std::string out = (dir / "fig2a.csv").string();
    REQUIRE(cli("spectrum --preset fig2a --points 801 --out \"" + out + "\" 2>/dev/null") == 0);
    const auto table = parse_csv(read_file(out), {"omega", "T", "R", "A"}, "cli");
    REQUIRE(table.rows.size() == 801);

    REQUIRE(cli("presets > /dev/null") == 0);
    REQUIRE(cli("bundle --preset fig2b --outdir \"" + (dir / "bundle").string() + "\" 2>/dev/null") == 0);
    REQUIRE(fs::exists(dir / "bundle" / "beta_eff.csv"));

    REQUIRE(cli("spectrum --preset fig9 2>/dev/null") == 2);
    REQUIRE(cli("spectrum --bogus 2>/dev/null") == 2);
    REQUIRE(cli("spectrum --preset fig2a --config x.json 2>/dev/null") == 2);

    auto bad = preset_json("fig2a");
    bad["model"]["gama"] = 0.3;
    write_file_atomic(dir / "bad.json", bad.dump());
    REQUIRE(cli("spectrum --config \"" + (dir / "bad.json").string() + "\" 2>/dev/null") == 2);

    // chi = -i kappa/2 cancels the cavity loss at omega = omega_ph.
    auto singular = preset_json("empty_cavity");
    singular["model"]["table"] = json::parse("[[-10.0, 0.0, -0.05], [10.0, 0.0, -0.05]]");
    write_file_atomic(dir / "singular.json", singular.dump());
    REQUIRE(cli("spectrum --config \"" + (dir / "singular.json").string() + "\" > /dev/null 2>&1") == 3);

    REQUIRE(cli("spectrum --config \"" + (dir / "missing.json").string() + "\" 2>/dev/null") == 4);
}
