// polarispec: cavity transmission/reflection/absorption from molecular
// susceptibility models.
//
// Exit status: 0 success, 2 invalid configuration or arguments,
// 3 numerical failure, 4 I/O failure.

#include <polarispec/polarispec.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace
{

namespace ps = polarispec;

enum exit_code
{
    exit_ok = 0,
    exit_validation = 2,
    exit_numerical = 3,
    exit_io = 4
};

struct grid_overrides
{
    std::optional<long long> points;
    std::optional<double> omega_min;
    std::optional<double> omega_max;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--points", points, "Override the number of grid points");
        cmd->add_option("--omega-min", omega_min, "Override the lower grid bound");
        cmd->add_option("--omega-max", omega_max, "Override the upper grid bound");
    }

    void apply(ps::json& doc) const
    {
        if (points)
            doc["grid"]["n_points"] = *points;
        if (omega_min)
            doc["grid"]["omega_min"] = *omega_min;
        if (omega_max)
            doc["grid"]["omega_max"] = *omega_max;
    }
};

struct source_options
{
    std::string config;
    std::string preset;

    void attach(CLI::App* cmd)
    {
        auto* c = cmd->add_option("--config", config, "Scenario JSON file");
        auto* p = cmd->add_option("--preset", preset, "Bundled preset name (see `polarispec presets`)");
        c->excludes(p);
    }

    ps::Scenario load(const grid_overrides& g) const
    {
        if (config.empty() && preset.empty())
            throw ps::ValidationError("one of --config or --preset is required");
        std::filesystem::path base = ".";
        ps::json doc;
        if (!config.empty()) {
            doc = ps::parse_json_text(ps::read_file(config), config);
            base = std::filesystem::path(config).parent_path();
        } else {
            doc = ps::preset_json(preset);
        }
        if (doc.is_object() && doc.contains("grid") && doc["grid"].is_object())
            g.apply(doc);
        return ps::parse_scenario(doc, base);
    }
};

void print_peaks(const ps::TraSpectra& s)
{
    const auto peaks = ps::local_maxima(s.transmission());
    std::fprintf(stderr, "transmission peaks: %zu", peaks.size());
    for (const auto& p : peaks)
        std::fprintf(stderr, " %.6g", p.omega);
    std::fprintf(stderr, "\nsplitting: %.6g\n", ps::peak_splitting(peaks));
    if (s.has_gain())
        std::fprintf(stderr, "warning: negative absorption (gain) present\n");
}

int run(int argc, char** argv)
{
    CLI::App app{"Linear optical spectra of molecular microcavities"};
    app.require_subcommand(1);

    grid_overrides spectrum_grid, bundle_grid, sweep_grid;
    source_options spectrum_src, bundle_src;
    std::string out_csv, out_svg, sweep_config, outdir, show_preset;

    auto* spectrum = app.add_subcommand("spectrum", "Compute T, R and A for one scenario");
    spectrum_src.attach(spectrum);
    spectrum->add_option("--out", out_csv, "Write the spectra CSV here (default: configured outputs, else stdout)");
    spectrum->add_option("--svg", out_svg, "Write an SVG plot here");
    spectrum_grid.attach(spectrum);

    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
    sweep->add_option("--config", sweep_config, "Sweep JSON file")->required();
    sweep_grid.attach(sweep);

    auto* bundle = app.add_subcommand("bundle", "Export chi, J_eff, beta_eff and spectra CSVs");
    bundle_src.attach(bundle);
    bundle->add_option("--outdir", outdir, "Output directory")->required();
    bundle_grid.attach(bundle);

    auto* presets = app.add_subcommand("presets", "List bundled presets or print one");
    presets->add_option("--show", show_preset, "Print the JSON of this preset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }

    if (*spectrum) {
        auto s = spectrum_src.load(spectrum_grid);
        const bool override_outputs = !out_csv.empty() || !out_svg.empty();
        if (override_outputs)
            s.outputs.clear();
        const auto result = ps::run_scenario(s);
        if (!out_csv.empty())
            ps::write_csv(out_csv, ps::tra_table(result.spectra));
        if (!out_svg.empty())
            ps::write_file_atomic(out_svg, ps::tra_svg(result.spectra, s.description));
        if (s.outputs.empty() && out_csv.empty())
            std::cout << ps::tra_table(result.spectra).to_string();
        print_peaks(result.spectra);
        return exit_ok;
    }
    if (*sweep) {
        auto doc = ps::parse_json_text(ps::read_file(sweep_config), sweep_config);
        const auto base_dir = std::filesystem::path(sweep_config).parent_path();
        auto sw = ps::parse_sweep(doc, base_dir);
        sweep_grid.apply(sw.base);
        ps::parse_scenario(sw.base, base_dir);
        const auto points = ps::run_sweep(sw);
        std::cout << "value,peak_count,peak_splitting\n";
        for (const auto& p : points)
            std::cout << p.value.dump() << ',' << p.peak_count << ',' << ps::format_number(p.peak_splitting) << '\n';
        return exit_ok;
    }
    if (*bundle) {
        const auto s = bundle_src.load(bundle_grid);
        for (const auto& p : ps::export_bundle(s, outdir))
            std::cerr << "wrote " << p.string() << '\n';
        return exit_ok;
    }
    if (*presets) {
        if (!show_preset.empty()) {
            std::cout << ps::preset_json(show_preset).dump(2) << '\n';
        } else {
            for (const auto& n : ps::preset_names())
                std::cout << n << '\t' << ps::preset(n).description << '\n';
        }
        return exit_ok;
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const ps::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const ps::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const ps::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numerical;
    }
}
