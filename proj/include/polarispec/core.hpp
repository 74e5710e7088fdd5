#ifndef POLARISPEC_CORE_HPP
#define POLARISPEC_CORE_HPP

// Shared domain types: uniform frequency/time grids, spectra on those grids,
// and a few generic spectrum utilities (peak finding, Hilbert transform,
// one-sided Fourier sums). Units: hbar = 1, every frequency, rate and
// coupling in the same arbitrary unit.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polarispec
{

using complex = std::complex<double>;

inline constexpr complex I{0.0, 1.0};

// Error hierarchy. The CLI maps each kind to its own exit status.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: inverted bounds, negative widths, unknown config keys.
class ValidationError : public Error
{
public:
    using Error::Error;
};

// Non-finite values, singular denominators, physically inconsistent results.
class NumericalError : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    using Error::Error;
};

/// Uniform, endpoint-inclusive frequency axis.
class FrequencyGrid
{
public:
    FrequencyGrid(double omega_min, double omega_max, std::size_t n_points)
        : omega_min_(omega_min), omega_max_(omega_max), n_points_(n_points)
    {
        if (!std::isfinite(omega_min) || !std::isfinite(omega_max))
            throw ValidationError("frequency grid bounds must be finite");
        if (!(omega_min < omega_max))
            throw ValidationError("frequency grid requires omega_min < omega_max (got " +
                                  std::to_string(omega_min) + ", " + std::to_string(omega_max) + ")");
        if (n_points < 2)
            throw ValidationError("frequency grid requires at least 2 points (got " +
                                  std::to_string(n_points) + ")");
        spacing_ = (omega_max - omega_min) / static_cast<double>(n_points - 1);
        if (!(spacing_ > 0.0))
            throw ValidationError("frequency grid spacing underflows to zero");
    }

    double omega_min() const { return omega_min_; }
    double omega_max() const { return omega_max_; }
    std::size_t size() const { return n_points_; }
    double spacing() const { return spacing_; }

    // The last point is pinned to omega_max so that both endpoints are exact.
    double operator[](std::size_t i) const
    {
        if (i + 1 == n_points_)
            return omega_max_;
        return omega_min_ + static_cast<double>(i) * spacing_;
    }

    std::vector<double> points() const
    {
        std::vector<double> out(n_points_);
        for (std::size_t i = 0; i < n_points_; ++i)
            out[i] = (*this)[i];
        return out;
    }

    // Same spacing and size, every point moved by `offset`.
    FrequencyGrid shifted(double offset) const
    {
        return FrequencyGrid(omega_min_ + offset, omega_max_ + offset, n_points_);
    }

    friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

private:
    double omega_min_;
    double omega_max_;
    std::size_t n_points_;
    double spacing_ = 0.0;
};

inline FrequencyGrid make_grid(double omega_min, double omega_max, std::size_t n_points)
{
    return FrequencyGrid(omega_min, omega_max, n_points);
}

// Signed overload so callers passing a negative count get a validation error
// instead of a wrapped size_t.
inline FrequencyGrid make_grid(double omega_min, double omega_max, long long n_points)
{
    if (n_points < 2)
        throw ValidationError("frequency grid requires at least 2 points (got " +
                              std::to_string(n_points) + ")");
    return FrequencyGrid(omega_min, omega_max, static_cast<std::size_t>(n_points));
}

inline FrequencyGrid make_grid(double omega_min, double omega_max, int n_points)
{
    return make_grid(omega_min, omega_max, static_cast<long long>(n_points));
}

/// Uniform time axis starting at t = 0.
class TimeGrid
{
public:
    TimeGrid(double t_max, std::size_t n_points) : t_max_(t_max), n_points_(n_points)
    {
        if (!std::isfinite(t_max) || !(t_max > 0.0))
            throw ValidationError("time grid requires t_max > 0");
        if (n_points < 2)
            throw ValidationError("time grid requires at least 2 points");
        step_ = t_max / static_cast<double>(n_points - 1);
    }

    double t_max() const { return t_max_; }
    std::size_t size() const { return n_points_; }
    double step() const { return step_; }

    double operator[](std::size_t i) const
    {
        if (i + 1 == n_points_)
            return t_max_;
        return static_cast<double>(i) * step_;
    }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double t_max_;
    std::size_t n_points_;
    double step_ = 0.0;
};

namespace detail
{
template <typename Grid, typename Value>
void check_samples(const Grid& grid, const std::vector<Value>& values, const char* what)
{
    if (values.size() != grid.size())
        throw ValidationError(std::string(what) + ": expected " + std::to_string(grid.size()) +
                              " samples, got " + std::to_string(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        bool finite;
        if constexpr (std::is_same_v<Value, complex>)
            finite = std::isfinite(values[i].real()) && std::isfinite(values[i].imag());
        else
            finite = std::isfinite(values[i]);
        if (!finite)
            throw NumericalError(std::string(what) + ": non-finite value at index " + std::to_string(i));
    }
}
} // namespace detail

/// Complex samples on a frequency grid (chi, D^R, ...). Immutable.
class ComplexSpectrum
{
public:
    ComplexSpectrum(FrequencyGrid grid, std::vector<complex> values)
        : grid_(std::move(grid)), values_(std::move(values))
    {
        detail::check_samples(grid_, values_, "complex spectrum");
    }

    const FrequencyGrid& grid() const { return grid_; }
    std::span<const complex> values() const { return values_; }
    const complex& operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

private:
    FrequencyGrid grid_;
    std::vector<complex> values_;
};

/// Real samples on a frequency grid (J^eff, T, R, A, ...). Immutable.
class RealSpectrum
{
public:
    RealSpectrum(FrequencyGrid grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values))
    {
        detail::check_samples(grid_, values_, "real spectrum");
    }

    const FrequencyGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    double max() const { return *std::max_element(values_.begin(), values_.end()); }

private:
    FrequencyGrid grid_;
    std::vector<double> values_;
};

/// Complex samples on a time grid, e.g. a dipole correlation function C2(t).
class ComplexTimeSeries
{
public:
    ComplexTimeSeries(TimeGrid grid, std::vector<complex> values)
        : grid_(std::move(grid)), values_(std::move(values))
    {
        detail::check_samples(grid_, values_, "time series");
    }

    const TimeGrid& grid() const { return grid_; }
    std::span<const complex> values() const { return values_; }
    const complex& operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

private:
    TimeGrid grid_;
    std::vector<complex> values_;
};

/// Transmission, reflection and absorption on one shared grid.
///
/// Construction checks T + R + A = 1 pointwise (to 1e-12 relative to the
/// magnitude of the three terms). Negative absorption (gain media fed through
/// the generic transition path) is kept as is and reported by has_gain().
class TraSpectra
{
public:
    static constexpr double identity_tolerance = 1e-12;

    TraSpectra(RealSpectrum transmission, RealSpectrum reflection, RealSpectrum absorption)
        : t_(std::move(transmission)), r_(std::move(reflection)), a_(std::move(absorption))
    {
        if (!(t_.grid() == r_.grid()) || !(t_.grid() == a_.grid()))
            throw ValidationError("T, R and A must share one frequency grid");
        for (std::size_t i = 0; i < t_.size(); ++i) {
            const double scale = std::max(1.0, std::abs(t_[i]) + std::abs(r_[i]) + std::abs(a_[i]));
            if (std::abs(t_[i] + r_[i] + a_[i] - 1.0) > identity_tolerance * scale)
                throw NumericalError("T + R + A != 1 at omega = " + std::to_string(t_.grid()[i]));
        }
    }

    const FrequencyGrid& grid() const { return t_.grid(); }
    const RealSpectrum& transmission() const { return t_; }
    const RealSpectrum& reflection() const { return r_; }
    const RealSpectrum& absorption() const { return a_; }

    bool has_gain() const
    {
        const auto a = a_.values();
        return std::any_of(a.begin(), a.end(), [](double v) { return v < -identity_tolerance; });
    }

private:
    RealSpectrum t_;
    RealSpectrum r_;
    RealSpectrum a_;
};

struct Peak
{
    double omega;
    double value;
};

// Interior points strictly above both neighbours whose height over the higher
// of the two flanking minima (topographic prominence) exceeds min_prominence.
// Sorted by frequency.
inline std::vector<Peak> local_maxima(const RealSpectrum& s, double min_prominence)
{
    const auto y = s.values();
    const std::size_t n = y.size();
    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(y[i] > y[i - 1] && y[i] > y[i + 1]))
            continue;
        double left_min = y[i];
        for (std::size_t j = i; j-- > 0;) {
            if (y[j] > y[i])
                break;
            left_min = std::min(left_min, y[j]);
        }
        double right_min = y[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            if (y[j] > y[i])
                break;
            right_min = std::min(right_min, y[j]);
        }
        const double prominence = y[i] - std::max(left_min, right_min);
        if (prominence > min_prominence)
            peaks.push_back({s.grid()[i], y[i]});
    }
    return peaks;
}

inline constexpr double default_prominence_fraction = 1e-3;

inline std::vector<Peak> local_maxima(const RealSpectrum& s)
{
    const auto y = s.values();
    const double top = *std::max_element(y.begin(), y.end());
    return local_maxima(s, default_prominence_fraction * std::abs(top));
}

// Distance between the outermost peaks, 0 when fewer than two are found.
inline double peak_splitting(const std::vector<Peak>& peaks)
{
    if (peaks.size() < 2)
        return 0.0;
    return peaks.back().omega - peaks.front().omega;
}

/// Principal-value Hilbert transform (1/pi) P int f(w')/(w' - w) dw' over the
/// grid, i.e. the Kramers-Kronig real part of a function analytic in the upper
/// half plane whose imaginary part is `im`.
///
/// The singularity is subtracted: P int = int (f(w') - f(w))/(w' - w) dw'
/// + f(w) ln((b - w)/(w - a)), the regular part by the trapezoid rule with the
/// removable point replaced by a central-difference derivative. Contributions
/// from outside the grid are absent, so values near the edges are biased; the
/// two endpoints copy their inner neighbours.
inline RealSpectrum hilbert_transform(const RealSpectrum& im)
{
    const auto& grid = im.grid();
    const auto f = im.values();
    const std::size_t n = f.size();
    const double h = grid.spacing();
    const double a = grid.omega_min();
    const double b = grid.omega_max();
    const auto w = grid.points();
    std::vector<double> out(n, 0.0);
    if (n < 3)
        return RealSpectrum(grid, out);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double fi = f[i];
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double g;
            if (j == i)
                g = (f[i + 1] - f[i - 1]) / (2.0 * h);
            else
                g = (f[j] - fi) / (w[j] - w[i]);
            sum += (j == 0 || j + 1 == n) ? 0.5 * g : g;
        }
        out[i] = (sum * h + fi * std::log((b - w[i]) / (w[i] - a))) / std::numbers::pi;
    }
    out[0] = out[1];
    out[n - 1] = out[n - 2];
    return RealSpectrum(grid, std::move(out));
}

/// -i int_0^{t_max} e^{i w t} f(t) dt by the trapezoid rule. The phase is
/// advanced by recurrence and re-anchored every 512 steps.
inline complex one_sided_fourier(const ComplexTimeSeries& f, double omega)
{
    const auto& tg = f.grid();
    const std::size_t n = f.size();
    const double dt = tg.step();
    const complex step = std::polar(1.0, omega * dt);
    complex phase{1.0, 0.0};
    complex sum{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
        if (k % 512 == 0)
            phase = std::polar(1.0, omega * tg[k]);
        const complex term = phase * f[k];
        sum += (k == 0 || k + 1 == n) ? 0.5 * term : term;
        phase *= step;
    }
    return -I * sum * dt;
}

// Trapezoid weights for a uniform grid.
inline double trapezoid_weight(std::size_t i, std::size_t n, double h)
{
    return (i == 0 || i + 1 == n) ? 0.5 * h : h;
}

} // namespace polarispec

#endif // POLARISPEC_CORE_HPP
