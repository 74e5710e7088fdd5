#ifndef POLARISPEC_SCENARIO_HPP
#define POLARISPEC_SCENARIO_HPP

// Declarative scenarios: a JSON document naming a cavity, a molecular model,
// a frequency grid and a method, plus parameter sweeps and the bundled
// figure presets.

#include "bathmap.hpp"
#include "core.hpp"
#include "io.hpp"
#include "spectra.hpp"
#include "susceptibility.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace polarispec
{

using json = nlohmann::json;

struct Method
{
    enum class Kind
    {
        harmonic,
        finite_n
    };
    Kind kind = Kind::harmonic;
    std::size_t n_modes = 0;
    std::optional<double> gamma_mode;
};

struct OutputSpec
{
    std::string csv;
    std::optional<std::string> svg;
};

struct Scenario
{
    std::string description;
    CavityParams cavity;
    EnsembleModel model;
    FrequencyGrid grid;
    Method method;
    std::vector<OutputSpec> outputs;
    std::optional<std::string> chi_path; // tabulated_chi source as written in the config
};

namespace detail
{
inline void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed)
{
    if (!j.is_object())
        throw ValidationError("'" + where + "' must be a JSON object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ValidationError("unknown key '" + (where.empty() ? "" : where + ".") + item.key() + "'");
}

inline std::string key_path(const std::string& where, const std::string& key)
{
    return where.empty() ? key : where + "." + key;
}

inline const json& require(const json& j, const std::string& where, const std::string& key)
{
    if (!j.contains(key))
        throw ValidationError("missing key '" + key_path(where, key) + "'");
    return j.at(key);
}

inline double as_number(const json& v, const std::string& path)
{
    if (!v.is_number())
        throw ValidationError("'" + path + "' must be a number");
    return v.get<double>();
}

inline double number(const json& j, const std::string& where, const std::string& key)
{
    return as_number(require(j, where, key), key_path(where, key));
}

inline double number_or(const json& j, const std::string& where, const std::string& key, double fallback)
{
    return j.contains(key) ? as_number(j.at(key), key_path(where, key)) : fallback;
}

inline std::string string_value(const json& j, const std::string& where, const std::string& key)
{
    const auto& v = require(j, where, key);
    if (!v.is_string())
        throw ValidationError("'" + key_path(where, key) + "' must be a string");
    return v.get<std::string>();
}

inline std::size_t count_value(const json& v, const std::string& path)
{
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ValidationError("'" + path + "' must be a nonnegative integer");
    return v.get<std::size_t>();
}

inline InverseTemperature beta_value(const json& v, const std::string& path)
{
    if (v.is_string()) {
        if (v.get<std::string>() == "inf")
            return InverseTemperature::zero_temperature();
        throw ValidationError("'" + path + "' must be a number or \"inf\"");
    }
    try {
        return InverseTemperature::finite(as_number(v, path));
    } catch (const ValidationError& e) {
        throw ValidationError("'" + path + "': " + e.what());
    }
}

inline json beta_json(const InverseTemperature& b)
{
    if (b.is_infinite())
        return "inf";
    return b.value();
}

template <typename F>
auto with_context(const std::string& path, F&& f)
{
    try {
        return f();
    } catch (const ValidationError& e) {
        throw ValidationError("'" + path + "': " + e.what());
    }
}

inline CavityParams parse_cavity(const json& j)
{
    check_keys(j, "cavity", {"omega_ph", "kappa_L", "kappa_R"});
    CavityParams c{number(j, "cavity", "omega_ph"), number(j, "cavity", "kappa_L"), number(j, "cavity", "kappa_R")};
    with_context("cavity", [&] {
        c.validate();
        return 0;
    });
    return c;
}

inline TlsEnsemble parse_tls_fields(const json& j, bool with_beta)
{
    TlsEnsemble m;
    m.n_emitters = number_or(j, "model", "n_emitters", 1.0);
    m.g = number(j, "model", "g");
    m.gamma = number(j, "model", "gamma");
    if (with_beta) {
        m.omega_exc = number(j, "model", "omega_exc");
        m.beta = beta_value(require(j, "model", "beta"), "model.beta");
    }
    return m;
}

inline EnsembleModel parse_model(const json& j, const std::filesystem::path& base_dir,
                                 std::optional<std::string>& chi_path)
{
    if (!j.is_object())
        throw ValidationError("'model' must be a JSON object");
    const std::string type = string_value(j, "model", "type");
    if (type == "tls") {
        check_keys(j, "model", {"type", "n_emitters", "g", "omega_exc", "beta", "gamma"});
        auto m = parse_tls_fields(j, true);
        with_context("model", [&] {
            m.validate();
            return 0;
        });
        return m;
    }
    if (type == "disordered_tls") {
        check_keys(j, "model", {"type", "n_emitters", "g", "gamma", "disorder"});
        DisorderedTls m{parse_tls_fields(j, false), {}};
        const auto& d = require(j, "model", "disorder");
        check_keys(d, "model.disorder", {"kind", "center", "sigma"});
        const std::string kind = string_value(d, "model.disorder", "kind");
        if (kind == "gaussian")
            m.disorder.kind = DisorderKind::gaussian;
        else if (kind == "lorentzian")
            m.disorder.kind = DisorderKind::lorentzian;
        else
            throw ValidationError("'model.disorder.kind' must be \"gaussian\" or \"lorentzian\"");
        m.disorder.center = number(d, "model.disorder", "center");
        m.disorder.sigma = number(d, "model.disorder", "sigma");
        m.ensemble.omega_exc = m.disorder.center;
        with_context("model", [&] {
            m.ensemble.validate();
            m.disorder.validate();
            return 0;
        });
        return m;
    }
    if (type == "vibronic") {
        check_keys(j, "model", {"type", "n_emitters", "g", "omega_exc", "omega_v", "huang_rhys", "gamma", "m_max"});
        VibronicModel m;
        m.n_emitters = number_or(j, "model", "n_emitters", 1.0);
        m.g = number(j, "model", "g");
        m.omega_exc = number(j, "model", "omega_exc");
        m.omega_v = number(j, "model", "omega_v");
        m.huang_rhys = number(j, "model", "huang_rhys");
        m.gamma = number(j, "model", "gamma");
        if (j.contains("m_max"))
            m.m_max = static_cast<int>(count_value(j.at("m_max"), "model.m_max"));
        with_context("model", [&] {
            m.validate();
            return 0;
        });
        return m;
    }
    if (type == "multilevel") {
        check_keys(j, "model", {"type", "n_emitters", "g", "gamma", "levels", "populations", "dipoles"});
        MultilevelModel m;
        m.n_emitters = number_or(j, "model", "n_emitters", 1.0);
        m.g = number(j, "model", "g");
        m.gamma = number(j, "model", "gamma");
        const auto& levels = require(j, "model", "levels");
        const auto& pops = require(j, "model", "populations");
        if (!levels.is_array() || !pops.is_array() || levels.size() != pops.size())
            throw ValidationError("'model.levels' and 'model.populations' must be arrays of equal length");
        for (std::size_t i = 0; i < levels.size(); ++i)
            m.levels.push_back({as_number(levels[i], "model.levels[" + std::to_string(i) + "]"),
                                as_number(pops[i], "model.populations[" + std::to_string(i) + "]")});
        const auto& dipoles = require(j, "model", "dipoles");
        if (!dipoles.is_array())
            throw ValidationError("'model.dipoles' must be an array");
        for (std::size_t i = 0; i < dipoles.size(); ++i) {
            const std::string where = "model.dipoles[" + std::to_string(i) + "]";
            check_keys(dipoles[i], where, {"between", "amplitude"});
            const auto& between = require(dipoles[i], where, "between");
            if (!between.is_array() || between.size() != 2)
                throw ValidationError("'" + where + ".between' must list two level numbers");
            const auto a = count_value(between[0], where + ".between");
            const auto b = count_value(between[1], where + ".between");
            if (a < 1 || b < 1)
                throw ValidationError("'" + where + ".between': levels are numbered from 1");
            m.dipoles.push_back({a - 1, b - 1, number_or(dipoles[i], where, "amplitude", 1.0)});
        }
        with_context("model", [&] {
            m.validate();
            return 0;
        });
        return m;
    }
    if (type == "tabulated_chi") {
        check_keys(j, "model", {"type", "path", "table"});
        if (j.contains("path") == j.contains("table"))
            throw ValidationError("'model' of type tabulated_chi needs exactly one of 'path' or 'table'");
        if (j.contains("path")) {
            const std::string p = string_value(j, "model", "path");
            chi_path = p;
            std::filesystem::path full(p);
            if (full.is_relative())
                full = base_dir / full;
            return read_tabulated_chi(full);
        }
        const auto& rows = j.at("table");
        if (!rows.is_array())
            throw ValidationError("'model.table' must be an array of [omega, re_chi, im_chi] rows");
        TabulatedChi tab;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::string where = "model.table[" + std::to_string(i) + "]";
            if (!rows[i].is_array() || rows[i].size() != 3)
                throw ValidationError("'" + where + "' must be [omega, re_chi, im_chi]");
            tab.omega.push_back(as_number(rows[i][0], where));
            tab.chi.emplace_back(as_number(rows[i][1], where), as_number(rows[i][2], where));
        }
        with_context("model.table", [&] {
            tab.validate();
            return 0;
        });
        return tab;
    }
    throw ValidationError("'model.type' must be one of tls, disordered_tls, vibronic, multilevel, tabulated_chi "
                          "(got \"" + type + "\")");
}

inline json model_json(const EnsembleModel& model, const std::optional<std::string>& chi_path)
{
    return std::visit(
        [&](const auto& m) -> json {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, TlsEnsemble>) {
                return {{"type", "tls"},         {"n_emitters", m.n_emitters},      {"g", m.g},
                        {"omega_exc", m.omega_exc}, {"beta", beta_json(m.beta)}, {"gamma", m.gamma}};
            } else if constexpr (std::is_same_v<M, DisorderedTls>) {
                const char* kind = m.disorder.kind == DisorderKind::gaussian ? "gaussian" : "lorentzian";
                return {{"type", "disordered_tls"},
                        {"n_emitters", m.ensemble.n_emitters},
                        {"g", m.ensemble.g},
                        {"gamma", m.ensemble.gamma},
                        {"disorder", {{"kind", kind}, {"center", m.disorder.center}, {"sigma", m.disorder.sigma}}}};
            } else if constexpr (std::is_same_v<M, VibronicModel>) {
                json out = {{"type", "vibronic"},       {"n_emitters", m.n_emitters}, {"g", m.g},
                            {"omega_exc", m.omega_exc}, {"omega_v", m.omega_v},       {"huang_rhys", m.huang_rhys},
                            {"gamma", m.gamma}};
                if (m.m_max)
                    out["m_max"] = *m.m_max;
                return out;
            } else if constexpr (std::is_same_v<M, MultilevelModel>) {
                json levels = json::array(), pops = json::array(), dipoles = json::array();
                for (const auto& l : m.levels) {
                    levels.push_back(l.omega);
                    pops.push_back(l.population);
                }
                for (const auto& d : m.dipoles)
                    dipoles.push_back({{"between", {d.a + 1, d.b + 1}}, {"amplitude", d.amplitude}});
                return {{"type", "multilevel"}, {"n_emitters", m.n_emitters}, {"g", m.g},         {"gamma", m.gamma},
                        {"levels", levels},     {"populations", pops},        {"dipoles", dipoles}};
            } else {
                if (chi_path)
                    return {{"type", "tabulated_chi"}, {"path", *chi_path}};
                json rows = json::array();
                for (std::size_t i = 0; i < m.omega.size(); ++i)
                    rows.push_back({m.omega[i], m.chi[i].real(), m.chi[i].imag()});
                return {{"type", "tabulated_chi"}, {"table", rows}};
            }
        },
        model);
}
} // namespace detail

/// Parses a scenario document. Relative tabulated-chi paths are resolved
/// against `base_dir` (the config file's directory).
inline Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir = ".")
{
    using namespace detail;
    check_keys(j, "", {"description", "cavity", "model", "grid", "method", "outputs"});
    const auto& g = require(j, "", "grid");
    check_keys(g, "grid", {"omega_min", "omega_max", "n_points"});
    const double wmin = number(g, "grid", "omega_min");
    const double wmax = number(g, "grid", "omega_max");
    const auto& npts = require(g, "grid", "n_points");
    if (!npts.is_number_integer())
        throw ValidationError("'grid.n_points' must be an integer");
    const FrequencyGrid grid = with_context("grid", [&] { return make_grid(wmin, wmax, npts.get<long long>()); });

    std::optional<std::string> chi_path;
    Scenario s{"", parse_cavity(require(j, "", "cavity")), parse_model(require(j, "", "model"), base_dir, chi_path),
               grid, Method{}, {}, chi_path};
    if (j.contains("description")) {
        if (!j.at("description").is_string())
            throw ValidationError("'description' must be a string");
        s.description = j.at("description").get<std::string>();
    }

    const auto& m = require(j, "", "method");
    if (m.is_string()) {
        if (m.get<std::string>() != "harmonic")
            throw ValidationError("'method' must be \"harmonic\" or an object");
    } else {
        check_keys(m, "method", {"type", "n_modes", "gamma_mode"});
        const std::string type = string_value(m, "method", "type");
        if (type == "harmonic") {
            check_keys(m, "method", {"type"});
        } else if (type == "finite_n") {
            s.method.kind = Method::Kind::finite_n;
            s.method.n_modes = count_value(require(m, "method", "n_modes"), "method.n_modes");
            if (s.method.n_modes < 1)
                throw ValidationError("'method.n_modes' must be >= 1");
            if (m.contains("gamma_mode")) {
                s.method.gamma_mode = as_number(m.at("gamma_mode"), "method.gamma_mode");
                if (!(*s.method.gamma_mode > 0.0))
                    throw ValidationError("'method.gamma_mode' must be > 0");
            }
        } else {
            throw ValidationError("'method.type' must be \"harmonic\" or \"finite_n\"");
        }
    }

    if (j.contains("outputs")) {
        const auto& outs = j.at("outputs");
        if (!outs.is_array())
            throw ValidationError("'outputs' must be an array");
        for (std::size_t i = 0; i < outs.size(); ++i) {
            const std::string where = "outputs[" + std::to_string(i) + "]";
            check_keys(outs[i], where, {"csv", "svg"});
            OutputSpec o{string_value(outs[i], where, "csv"), std::nullopt};
            if (outs[i].contains("svg"))
                o.svg = string_value(outs[i], where, "svg");
            s.outputs.push_back(std::move(o));
        }
    }
    return s;
}

inline json to_json(const Scenario& s)
{
    json j;
    if (!s.description.empty())
        j["description"] = s.description;
    j["cavity"] = {{"omega_ph", s.cavity.omega_ph}, {"kappa_L", s.cavity.kappa_L}, {"kappa_R", s.cavity.kappa_R}};
    j["model"] = detail::model_json(s.model, s.chi_path);
    j["grid"] = {{"omega_min", s.grid.omega_min()}, {"omega_max", s.grid.omega_max()}, {"n_points", s.grid.size()}};
    if (s.method.kind == Method::Kind::harmonic) {
        j["method"] = {{"type", "harmonic"}};
    } else {
        j["method"] = {{"type", "finite_n"}, {"n_modes", s.method.n_modes}};
        if (s.method.gamma_mode)
            j["method"]["gamma_mode"] = *s.method.gamma_mode;
    }
    json outs = json::array();
    for (const auto& o : s.outputs) {
        json e = {{"csv", o.csv}};
        if (o.svg)
            e["svg"] = *o.svg;
        outs.push_back(e);
    }
    j["outputs"] = outs;
    return j;
}

inline json parse_json_text(const std::string& text, const std::string& source)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(source + ": invalid JSON: " + e.what());
    }
}

inline Scenario load_scenario(const std::filesystem::path& path)
{
    return parse_scenario(parse_json_text(read_file(path), path.string()), path.parent_path());
}

// ---------------------------------------------------------------------------
// Bundled presets, one per figure panel.

namespace detail
{
struct PresetEntry
{
    const char* name;
    const char* text;
};

inline const std::vector<PresetEntry>& preset_table()
{
    static const std::vector<PresetEntry> table = {
        // Fig. 2(a): omega_ph = omega_exc = 0, kappa = 0.1, gamma = 0.3, sqrt(N) g = 2.
        {"fig2a", R"({
          "description": "Identical two-level systems at T = 0, resonant with the cavity",
          "cavity": {"omega_ph": 0.0, "kappa_L": 0.05, "kappa_R": 0.05},
          "model": {"type": "tls", "n_emitters": 1, "g": 2.0, "omega_exc": 0.0, "beta": "inf", "gamma": 0.3},
          "grid": {"omega_min": -4.0, "omega_max": 4.0, "n_points": 4001},
          "method": {"type": "harmonic"},
          "outputs": []
        })"},
        // Fig. 2(b): same ensemble at finite temperature. The excitation sits at
        // omega_exc = 1 so that tanh(beta omega_exc / 2) is not trivially 0.
        {"fig2b", R"({
          "description": "Two-level systems at beta = 1 showing Rabi splitting contraction",
          "cavity": {"omega_ph": 1.0, "kappa_L": 0.05, "kappa_R": 0.05},
          "model": {"type": "tls", "n_emitters": 1, "g": 2.0, "omega_exc": 1.0, "beta": 1.0, "gamma": 0.3},
          "grid": {"omega_min": -3.0, "omega_max": 5.0, "n_points": 4001},
          "method": {"type": "harmonic"},
          "outputs": []
        })"},
        // Fig. 3(a): Gaussian disorder sigma = 1, kappa = gamma = 0.1, sqrt(N) g = 1.5.
        {"fig3a", R"({
          "description": "Gaussian energy-distributed two-level systems",
          "cavity": {"omega_ph": 0.0, "kappa_L": 0.05, "kappa_R": 0.05},
          "model": {"type": "disordered_tls", "n_emitters": 1, "g": 1.5, "gamma": 0.1,
                    "disorder": {"kind": "gaussian", "center": 0.0, "sigma": 1.0}},
          "grid": {"omega_min": -5.0, "omega_max": 5.0, "n_points": 4001},
          "method": {"type": "harmonic"},
          "outputs": []
        })"},
        // Fig. 3(b): Lorentzian disorder, otherwise as Fig. 3(a).
        {"fig3b", R"({
          "description": "Lorentzian energy-distributed two-level systems",
          "cavity": {"omega_ph": 0.0, "kappa_L": 0.05, "kappa_R": 0.05},
          "model": {"type": "disordered_tls", "n_emitters": 1, "g": 1.5, "gamma": 0.1,
                    "disorder": {"kind": "lorentzian", "center": 0.0, "sigma": 1.0}},
          "grid": {"omega_min": -5.0, "omega_max": 5.0, "n_points": 4001},
          "method": {"type": "harmonic"},
          "outputs": []
        })"},
        // Fig. 4: vibronic progression, omega_v = 0.3, S = 3, kappa = gamma = 0.1, sqrt(N) g = 1.
        {"fig4", R"({
          "description": "Two-level systems with vibronic coupling",
          "cavity": {"omega_ph": 0.0, "kappa_L": 0.05, "kappa_R": 0.05},
          "model": {"type": "vibronic", "n_emitters": 1, "g": 1.0, "omega_exc": 0.0,
                    "omega_v": 0.3, "huang_rhys": 3.0, "gamma": 0.1},
          "grid": {"omega_min": -4.0, "omega_max": 4.0, "n_points": 4001},
          "method": {"type": "harmonic"},
          "outputs": []
        })"},
        // Fig. 5(a): three-level systems, p = (0.7, 0.2, 0.1), omega_ph = omega_12 = 1,
        // omega_23 = 2, kappa = 0.1, gamma = 0.3, sqrt(N) g = 1, unit dipoles.
        {"fig5a", R"({
          "description": "Three-level systems, p1 > p2 > p3",
          "cavity": {"omega_ph": 1.0, "kappa_L": 0.05, "kappa_R": 0.05},
          "model": {"type": "multilevel", "n_emitters": 1, "g": 1.0, "gamma": 0.3,
                    "levels": [0.0, 1.0, 3.0], "populations": [0.7, 0.2, 0.1],
                    "dipoles": [{"between": [1, 2], "amplitude": 1.0},
                                {"between": [2, 3], "amplitude": 1.0},
                                {"between": [1, 3], "amplitude": 1.0}]},
          "grid": {"omega_min": -1.0, "omega_max": 5.0, "n_points": 4001},
          "method": {"type": "harmonic"},
          "outputs": []
        })"},
        // Fig. 5(b): p = (0.48, 0.48, 0.04), the 1-2 transition is saturated.
        {"fig5b", R"({
          "description": "Three-level systems with the 1-2 transition saturated",
          "cavity": {"omega_ph": 1.0, "kappa_L": 0.05, "kappa_R": 0.05},
          "model": {"type": "multilevel", "n_emitters": 1, "g": 1.0, "gamma": 0.3,
                    "levels": [0.0, 1.0, 3.0], "populations": [0.48, 0.48, 0.04],
                    "dipoles": [{"between": [1, 2], "amplitude": 1.0},
                                {"between": [2, 3], "amplitude": 1.0},
                                {"between": [1, 3], "amplitude": 1.0}]},
          "grid": {"omega_min": -1.0, "omega_max": 5.0, "n_points": 4001},
          "method": {"type": "harmonic"},
          "outputs": []
        })"},
        // Fig. 5(c): p1 = p2 = p3, every transition saturated.
        {"fig5c", R"({
          "description": "Three-level systems with equal populations",
          "cavity": {"omega_ph": 1.0, "kappa_L": 0.05, "kappa_R": 0.05},
          "model": {"type": "multilevel", "n_emitters": 1, "g": 1.0, "gamma": 0.3,
                    "levels": [0.0, 1.0, 3.0],
                    "populations": [0.3333333333333333, 0.3333333333333333, 0.3333333333333333],
                    "dipoles": [{"between": [1, 2], "amplitude": 1.0},
                                {"between": [2, 3], "amplitude": 1.0},
                                {"between": [1, 3], "amplitude": 1.0}]},
          "grid": {"omega_min": -1.0, "omega_max": 5.0, "n_points": 4001},
          "method": {"type": "harmonic"},
          "outputs": []
        })"},
        // Bare cavity: chi = 0 everywhere.
        {"empty_cavity", R"({
          "description": "Empty cavity",
          "cavity": {"omega_ph": 0.0, "kappa_L": 0.05, "kappa_R": 0.05},
          "model": {"type": "tabulated_chi", "table": [[-1000.0, 0.0, 0.0], [1000.0, 0.0, 0.0]]},
          "grid": {"omega_min": -4.0, "omega_max": 4.0, "n_points": 4001},
          "method": {"type": "harmonic"},
          "outputs": []
        })"},
    };
    return table;
}
} // namespace detail

inline std::vector<std::string> preset_names()
{
    std::vector<std::string> names;
    for (const auto& p : detail::preset_table())
        names.emplace_back(p.name);
    return names;
}

inline json preset_json(const std::string& name)
{
    for (const auto& p : detail::preset_table())
        if (name == p.name)
            return json::parse(p.text);
    std::string known;
    for (const auto& n : preset_names())
        known += (known.empty() ? "" : ", ") + n;
    throw ValidationError("unknown preset '" + name + "' (available: " + known + ")");
}

inline Scenario preset(const std::string& name)
{
    return parse_scenario(preset_json(name));
}

// ---------------------------------------------------------------------------
// Running.

struct ScenarioResult
{
    ComplexSpectrum chi;
    TraSpectra spectra;
};

inline ScenarioResult compute_scenario(const Scenario& s)
{
    auto x = chi(s.model, s.grid);
    if (s.method.kind == Method::Kind::harmonic) {
        auto tra = spectra_harmonic(x, s.cavity);
        return {std::move(x), std::move(tra)};
    }
    const auto d = green_finite_n_from_chi(x, s.cavity, s.method.n_modes, s.method.gamma_mode);
    auto tra = spectra_from_green(d, s.cavity);
    return {std::move(x), std::move(tra)};
}

inline void write_outputs(const Scenario& s, const TraSpectra& spectra)
{
    for (const auto& o : s.outputs) {
        write_csv(o.csv, tra_table(spectra));
        if (o.svg)
            write_file_atomic(*o.svg, tra_svg(spectra, s.description));
    }
}

inline ScenarioResult run_scenario(const Scenario& s)
{
    auto result = compute_scenario(s);
    write_outputs(s, result.spectra);
    return result;
}

/// Writes chi.csv, j_eff.csv, beta_eff.csv (transition-based models only) and
/// spectra.csv into `outdir`. Returns the files written.
inline std::vector<std::filesystem::path> export_bundle(const Scenario& s, const std::filesystem::path& outdir,
                                                        std::ostream& notices = std::cerr)
{
    const auto result = compute_scenario(s);
    std::vector<std::filesystem::path> written;
    const auto emit = [&](const std::string& name, const CsvTable& table) {
        const auto p = outdir / name;
        write_csv(p, table);
        written.push_back(p);
    };
    emit("chi.csv", chi_table(result.chi));
    emit("j_eff.csv", spectral_density_table(spectral_density_from_chi(result.chi)));

    const auto ts = rwa_transitions(s.model);
    std::size_t first = 0;
    while (first < s.grid.size() && !(s.grid[first] > 0.0))
        ++first;
    if (!ts) {
        notices << "notice: model has no transition data; beta_eff.csv not written\n";
    } else if (std::any_of(ts->begin(), ts->end(), [](const Transition& t) { return !(t.omega_zy > 0.0); })) {
        notices << "notice: transition frequencies are rotating-frame detunings; beta_eff.csv not written\n";
    } else if (s.grid.size() - first < 2) {
        notices << "notice: grid has fewer than two positive frequencies; beta_eff.csv not written\n";
    } else {
        const FrequencyGrid positive(s.grid[first], s.grid.omega_max(), s.grid.size() - first);
        emit("beta_eff.csv", effective_temperature_table(effective_temperature(*ts, positive)));
    }
    emit("spectra.csv", tra_table(result.spectra));
    return written;
}

// ---------------------------------------------------------------------------
// Sweeps.

struct Sweep
{
    json base; // normalized scenario document
    std::string parameter;
    std::vector<json> values;
    std::optional<std::string> summary_csv;
    std::optional<std::string> output_dir;
    std::filesystem::path base_dir = ".";
};

namespace detail
{
inline json::json_pointer parameter_pointer(const json& base, const std::string& dotted)
{
    if (dotted.empty())
        throw ValidationError("'parameter' must be a dotted path such as model.beta");
    std::string ptr;
    std::size_t start = 0;
    while (true) {
        const auto dot = dotted.find('.', start);
        ptr += "/" + dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (dot == std::string::npos)
            break;
        start = dot + 1;
    }
    const json::json_pointer p(ptr);
    if (!base.contains(p))
        throw ValidationError("sweep parameter '" + dotted + "' does not resolve against the base scenario");
    return p;
}

inline double summary_value(const json& v, std::size_t index)
{
    if (v.is_number())
        return v.get<double>();
    if (v.is_string() && v.get<std::string>() == "inf")
        return std::numeric_limits<double>::infinity();
    return static_cast<double>(index);
}
} // namespace detail

inline Sweep parse_sweep(const json& j, const std::filesystem::path& base_dir = ".")
{
    using namespace detail;
    check_keys(j, "", {"description", "base", "base_preset", "parameter", "values", "summary_csv", "output_dir"});
    if (j.contains("base") == j.contains("base_preset"))
        throw ValidationError("sweep needs exactly one of 'base' or 'base_preset'");
    Sweep sw;
    sw.base_dir = base_dir;
    const Scenario base = j.contains("base") ? parse_scenario(j.at("base"), base_dir)
                                             : preset(string_value(j, "", "base_preset"));
    sw.base = to_json(base);
    sw.base["outputs"] = json::array();
    sw.parameter = string_value(j, "", "parameter");
    parameter_pointer(sw.base, sw.parameter);
    const auto& values = require(j, "", "values");
    if (!values.is_array() || values.empty())
        throw ValidationError("'values' must be a nonempty array");
    sw.values.assign(values.begin(), values.end());
    if (j.contains("summary_csv"))
        sw.summary_csv = string_value(j, "", "summary_csv");
    if (j.contains("output_dir"))
        sw.output_dir = string_value(j, "", "output_dir");
    return sw;
}

inline Sweep load_sweep(const std::filesystem::path& path)
{
    return parse_sweep(parse_json_text(read_file(path), path.string()), path.parent_path());
}

struct SweepPoint
{
    json value;
    double summary_value;
    TraSpectra spectra;
    std::size_t peak_count;
    double peak_splitting;
};

/// The scenario a sweep evaluates for its `index`-th value.
inline Scenario sweep_scenario(const Sweep& sw, std::size_t index)
{
    json doc = sw.base;
    doc[detail::parameter_pointer(doc, sw.parameter)] = sw.values.at(index);
    try {
        return parse_scenario(doc, sw.base_dir);
    } catch (const ValidationError& e) {
        throw ValidationError("sweep value #" + std::to_string(index) + " (" + sw.values[index].dump() +
                              "): " + e.what());
    }
}

/// Runs every value in order. Writes a summary CSV `value,peak_splitting`
/// (non-scalar values are recorded by their index) and, with output_dir,
/// one `sweep_<k>.csv` spectrum per value.
inline std::vector<SweepPoint> run_sweep(const Sweep& sw)
{
    std::vector<SweepPoint> points;
    for (std::size_t k = 0; k < sw.values.size(); ++k) {
        const auto s = sweep_scenario(sw, k);
        auto result = compute_scenario(s);
        const auto peaks = local_maxima(result.spectra.transmission());
        if (sw.output_dir)
            write_csv(std::filesystem::path(*sw.output_dir) / ("sweep_" + std::to_string(k) + ".csv"),
                      tra_table(result.spectra));
        points.push_back({sw.values[k], detail::summary_value(sw.values[k], k), std::move(result.spectra),
                          peaks.size(), peak_splitting(peaks)});
    }
    if (sw.summary_csv) {
        CsvTable summary{{"value", "peak_splitting"}, {}};
        for (const auto& p : points)
            summary.rows.push_back({p.summary_value, p.peak_splitting});
        write_csv(*sw.summary_csv, summary);
    }
    return points;
}

} // namespace polarispec

#endif // POLARISPEC_SCENARIO_HPP
