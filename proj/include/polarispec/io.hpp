#ifndef POLARISPEC_IO_HPP
#define POLARISPEC_IO_HPP

// CSV export/import for spectra, correlation functions and effective
// temperatures, and a minimal static SVG line chart for T/R/A.
// Files are written to a temporary sibling and renamed into place.

#include "bathmap.hpp"
#include "core.hpp"
#include "spectra.hpp"
#include "susceptibility.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace polarispec
{

// Full precision, locale independent: 17 significant digits.
inline std::string format_number(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path(), ec);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out)
            throw IoError("failed writing " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path.string());
    }
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::string to_string() const
    {
        std::string out;
        for (std::size_t c = 0; c < header.size(); ++c)
            out += (c ? "," : "") + header[c];
        out += '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c)
                    out += ',';
                out += format_number(row[c]);
            }
            out += '\n';
        }
        return out;
    }
};

namespace detail
{
inline std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_commas(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}
} // namespace detail

/// Parses a CSV document whose first line must equal `expected_header`.
inline CsvTable parse_csv(const std::string& text, const std::vector<std::string>& expected_header,
                          const std::string& source = "csv")
{
    std::istringstream in(text);
    std::string line;
    CsvTable table;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty())
            continue;
        auto cells = detail::split_commas(line);
        if (table.header.empty()) {
            if (cells != expected_header) {
                std::string want;
                for (const auto& h : expected_header)
                    want += (want.empty() ? "" : ",") + h;
                throw ValidationError(source + ": expected header '" + want + "'");
            }
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != expected_header.size())
            throw ValidationError(source + ": line " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " fields");
        std::vector<double> row;
        for (const auto& c : cells) {
            try {
                std::size_t used = 0;
                const double v = std::stod(c, &used);
                if (used != c.size())
                    throw std::invalid_argument(c);
                row.push_back(v);
            } catch (const std::exception&) {
                throw ValidationError(source + ": line " + std::to_string(line_no) + ": '" + c +
                                      "' is not a number");
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty())
        throw ValidationError(source + ": empty file");
    return table;
}

// ---------------------------------------------------------------------------
// Typed tables.

inline CsvTable chi_table(const ComplexSpectrum& chi)
{
    CsvTable t{{"omega", "re_chi", "im_chi"}, {}};
    for (std::size_t i = 0; i < chi.size(); ++i)
        t.rows.push_back({chi.grid()[i], chi[i].real(), chi[i].imag()});
    return t;
}

inline CsvTable spectral_density_table(const RealSpectrum& j)
{
    CsvTable t{{"omega", "j_eff"}, {}};
    for (std::size_t i = 0; i < j.size(); ++i)
        t.rows.push_back({j.grid()[i], j[i]});
    return t;
}

inline CsvTable effective_temperature_table(const EffectiveTemperature& beta)
{
    CsvTable t{{"omega", "beta_eff"}, {}};
    for (std::size_t i = 0; i < beta.size(); ++i)
        t.rows.push_back({beta.grid()[i], beta[i]});
    return t;
}

inline CsvTable correlation_table(const CorrelationFunction& c2)
{
    CsvTable t{{"t", "re_c2", "im_c2"}, {}};
    for (std::size_t k = 0; k < c2.size(); ++k)
        t.rows.push_back({c2.grid()[k], c2[k].real(), c2[k].imag()});
    return t;
}

inline CsvTable tra_table(const TraSpectra& s)
{
    CsvTable t{{"omega", "T", "R", "A"}, {}};
    for (std::size_t i = 0; i < s.grid().size(); ++i)
        t.rows.push_back({s.grid()[i], s.transmission()[i], s.reflection()[i], s.absorption()[i]});
    return t;
}

inline TabulatedChi tabulated_chi_from_csv(const std::string& text, const std::string& source = "chi csv")
{
    const auto table = parse_csv(text, {"omega", "re_chi", "im_chi"}, source);
    TabulatedChi tab;
    for (const auto& row : table.rows) {
        tab.omega.push_back(row[0]);
        tab.chi.emplace_back(row[1], row[2]);
    }
    tab.validate();
    return tab;
}

inline TabulatedChi read_tabulated_chi(const std::filesystem::path& path)
{
    return tabulated_chi_from_csv(read_file(path), path.string());
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& table)
{
    write_file_atomic(path, table.to_string());
}

// ---------------------------------------------------------------------------
// SVG line chart of T, R and A against omega.

inline std::string tra_svg(const TraSpectra& s, const std::string& title = "")
{
    constexpr double width = 720.0, height = 440.0;
    constexpr double left = 64.0, right = 150.0, top = 36.0, bottom = 52.0;
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    const auto& grid = s.grid();
    double ymin = 0.0, ymax = 1.0;
    for (const RealSpectrum* r : {&s.transmission(), &s.reflection(), &s.absorption()})
        for (double v : r->values()) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    const double xa = grid.omega_min(), xb = grid.omega_max();
    const auto px = [&](double x) { return left + (x - xa) / (xb - xa) * pw; };
    const auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };
    const auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return std::string(buf);
    };
    const auto coord = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        o << "<text x=\"" << left << "\" y=\"22\" font-size=\"14\">" << title << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double x = xa + (xb - xa) * k / 4.0;
        const double y = ymin + (ymax - ymin) * k / 4.0;
        o << "<line x1=\"" << coord(px(x)) << "\" y1=\"" << top + ph << "\" x2=\"" << coord(px(x)) << "\" y2=\""
          << top + ph + 5 << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << coord(px(x)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << num(x)
          << "</text>\n";
        o << "<line x1=\"" << left - 5 << "\" y1=\"" << coord(py(y)) << "\" x2=\"" << left << "\" y2=\""
          << coord(py(y)) << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << left - 8 << "\" y=\"" << coord(py(y) + 4) << "\" text-anchor=\"end\">" << num(y)
          << "</text>\n";
    }
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">omega</text>\n";

    struct Trace
    {
        const RealSpectrum* data;
        const char* name;
        const char* color;
    };
    const Trace traces[] = {{&s.transmission(), "T", "#1f77b4"},
                            {&s.reflection(), "R", "#2ca02c"},
                            {&s.absorption(), "A", "#d62728"}};
    int slot = 0;
    for (const auto& tr : traces) {
        o << "<polyline fill=\"none\" stroke=\"" << tr.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < grid.size(); ++i)
            o << (i ? " " : "") << coord(px(grid[i])) << ',' << coord(py((*tr.data)[i]));
        o << "\"/>\n";
        const double ly = top + 16 + 20 * slot++;
        o << "<line x1=\"" << left + pw + 16 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 44 << "\" y2=\"" << ly
          << "\" stroke=\"" << tr.color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << left + pw + 50 << "\" y=\"" << ly + 4 << "\">" << tr.name << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace polarispec

#endif // POLARISPEC_IO_HPP
