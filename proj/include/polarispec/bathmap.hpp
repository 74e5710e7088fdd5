#ifndef POLARISPEC_BATHMAP_HPP
#define POLARISPEC_BATHMAP_HPP

// Surrogate harmonic bath of a molecular ensemble: dipole correlation
// function C2(t), effective spectral density J(w), frequency-resolved inverse
// temperature beta_eff(w), reconstruction of C2 from (J, beta_eff), and
// discretization of J into a finite set of bath modes.

#include "core.hpp"
#include "susceptibility.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace polarispec
{

// C2(t) samples for t >= 0, including the coupling prefactor. For t < 0,
// C2(-t) = conj C2(t).
using CorrelationFunction = ComplexTimeSeries;

/// beta_eff(w) on a strictly positive grid. +inf is a legal value (T = 0 line).
class EffectiveTemperature
{
public:
    EffectiveTemperature(FrequencyGrid grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values))
    {
        if (values_.size() != grid_.size())
            throw ValidationError("effective temperature: sample count does not match grid");
        for (double v : values_)
            if (std::isnan(v) || v < 0.0)
                throw NumericalError("effective temperature must be >= 0 or +inf");
    }

    const FrequencyGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

private:
    FrequencyGrid grid_;
    std::vector<double> values_;
};

struct BathMode
{
    double omega = 0.0;
    double coupling = 0.0; // c_j >= 0, phase absorbed
    double gamma = 0.0;
};

class DiscretizedBath
{
public:
    explicit DiscretizedBath(std::vector<BathMode> modes) : modes_(std::move(modes))
    {
        if (modes_.empty())
            throw ValidationError("discretized bath needs at least one mode");
        for (const auto& m : modes_) {
            if (!std::isfinite(m.omega) || !(m.omega > 0.0))
                throw ValidationError("bath mode frequencies must be > 0");
            if (!std::isfinite(m.coupling) || m.coupling < 0.0)
                throw ValidationError("bath mode couplings must be >= 0");
            if (!std::isfinite(m.gamma) || !(m.gamma > 0.0))
                throw ValidationError("bath mode linewidths must be > 0");
        }
    }

    std::span<const BathMode> modes() const { return modes_; }
    std::size_t size() const { return modes_.size(); }

    // sum_j c_j^2
    double total_coupling() const
    {
        double s = 0.0;
        for (const auto& m : modes_)
            s += m.coupling * m.coupling;
        return s;
    }

private:
    std::vector<BathMode> modes_;
};

/// C2(t) = sum p_y weight exp(-i (w_zy - i gamma/2) t).
inline CorrelationFunction correlation_from_transitions(const TransitionSet& ts, const TimeGrid& tg)
{
    std::vector<complex> c(tg.size());
    for (std::size_t k = 0; k < tg.size(); ++k) {
        const double t = tg[k];
        complex sum{0.0, 0.0};
        for (const auto& tr : ts)
            sum += tr.p_y * tr.weight * std::exp(complex(-0.5 * tr.gamma * t, -tr.omega_zy * t));
        c[k] = sum;
    }
    return CorrelationFunction(tg, std::move(c));
}

/// J(w) = i Theta(w) int_{-inf}^{inf} C2(t) sin(wt) dt = -2 Theta(w) int_0^tmax Im C2(t) sin(wt) dt.
///
/// Negative values within 1e-10 of the maximum are quadrature noise and are
/// set to zero. Anything more negative means the populations are inverted.
inline RealSpectrum spectral_density_from_correlation(const CorrelationFunction& c2, const FrequencyGrid& grid,
                                                      double clip_fraction = 1e-10)
{
    const auto& tg = c2.grid();
    const std::size_t nt = c2.size();
    std::vector<double> j(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid[i];
        if (w <= 0.0)
            continue;
        double sum = 0.0;
        for (std::size_t k = 0; k < nt; ++k)
            sum += trapezoid_weight(k, nt, tg.step()) * c2[k].imag() * std::sin(w * tg[k]);
        j[i] = -2.0 * sum;
    }
    double top = 0.0;
    for (double v : j)
        top = std::max(top, v);
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i] >= 0.0)
            continue;
        if (-j[i] <= clip_fraction * top) {
            j[i] = 0.0;
            continue;
        }
        throw NumericalError("spectral density is negative at omega = " + std::to_string(grid[i]) +
                             "; a surrogate harmonic bath cannot correspond to a system with population inversion");
    }
    return RealSpectrum(grid, std::move(j));
}

/// J(w) = Theta(w) Im chi(w), with Theta(0) = 1.
inline RealSpectrum spectral_density_from_chi(const ComplexSpectrum& chi)
{
    const auto& grid = chi.grid();
    std::vector<double> j(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] >= 0.0)
            j[i] = chi[i].imag();
    return RealSpectrum(grid, std::move(j));
}

namespace detail
{
// Detailed-balance split of one uphill line (frequency w_k > 0, lower/upper
// populations a >= b) into its emission C2(w) and absorption C2(-w) weights
// at frequency w > 0, per unit Lorentzian amplitude. The line is treated as
// a thermal oscillator at beta_k = ln(a/b)/w_k, so the split reproduces a
// and b exactly at w = w_k and keeps beta_k constant across the line.
struct LineSplit
{
    double plus;
    double minus;
};

inline LineSplit detailed_balance_split(double a, double b, double omega_k, double omega)
{
    if (omega_k == 0.0)
        return {a, b};
    if (b == 0.0)
        return {a, 0.0};
    if (a == b)
        return {a * omega_k / omega, a * omega_k / omega};
    const double beta_k = (std::log(a) - std::log(b)) / omega_k;
    const double x = beta_k * omega;
    const double diff = a - b;
    return {diff / -std::expm1(-x), diff / std::expm1(x)};
}
} // namespace detail

inline constexpr double beta_underflow_threshold = 1e-300;

/// beta_eff(w) = ln[C2(w)/C2(-w)] / w from the spectral decomposition of C2,
/// each line broadened by its Lorentzian and split by detailed balance.
/// Thermal inputs give beta at every w; a saturated line gives 0; a T = 0
/// line gives +inf.
inline EffectiveTemperature effective_temperature(const TransitionSet& ts, const FrequencyGrid& grid)
{
    if (!(grid.omega_min() > 0.0))
        throw ValidationError("effective temperature is defined on a positive-frequency grid");
    struct Line
    {
        double omega, weight, lower, upper, gamma;
    };
    std::vector<Line> lines;
    for (const auto& t : ts) {
        Line l = t.omega_zy >= 0.0 ? Line{t.omega_zy, t.weight, t.p_y, t.p_z, t.gamma}
                                   : Line{-t.omega_zy, t.weight, t.p_z, t.p_y, t.gamma};
        if (l.lower < l.upper)
            throw NumericalError("transition at omega = " + std::to_string(l.omega) +
                                 " is inverted; a surrogate harmonic bath cannot correspond to a system with "
                                 "population inversion");
        lines.push_back(l);
    }
    std::vector<double> beta(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid[i];
        double plus = 0.0;
        double minus = 0.0;
        for (const auto& l : lines) {
            const double hw = 0.5 * l.gamma;
            const double lorentz = hw / ((w - l.omega) * (w - l.omega) + hw * hw);
            const auto split = detail::detailed_balance_split(l.lower, l.upper, l.omega, w);
            plus += l.weight * lorentz * split.plus;
            minus += l.weight * lorentz * split.minus;
        }
        if (plus == 0.0 && minus == 0.0) {
            beta[i] = 0.0;
        } else if (minus < beta_underflow_threshold) {
            beta[i] = std::numeric_limits<double>::infinity();
        } else {
            const double ratio = plus / minus;
            if (ratio < 1.0 - 1e-12)
                throw NumericalError("C2(w)/C2(-w) < 1 at omega = " + std::to_string(w) +
                                     "; a surrogate harmonic bath cannot correspond to a system with "
                                     "population inversion");
            beta[i] = std::max(0.0, std::log(ratio)) / w;
        }
    }
    return EffectiveTemperature(grid, std::move(beta));
}

/// C2(t) = (1/pi) int J(w) [coth(beta_eff(w) w/2) cos(wt) - i sin(wt)] dw (trapezoid).
inline CorrelationFunction reconstruct_correlation(const RealSpectrum& j, const EffectiveTemperature& beta,
                                                   const TimeGrid& tg)
{
    if (!(j.grid() == beta.grid()))
        throw ValidationError("spectral density and effective temperature must share one grid");
    const auto& grid = j.grid();
    const std::size_t n = grid.size();
    struct Node
    {
        double omega, weight_cos, weight_sin;
    };
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < n; ++i) {
        if (j[i] == 0.0)
            continue;
        const double w = grid[i];
        const double x = 0.5 * beta[i] * w;
        double coth = 1.0;
        if (std::isfinite(beta[i])) {
            if (!(x > 0.0))
                throw NumericalError("coth(beta_eff w / 2) diverges at omega = " + std::to_string(w));
            coth = 1.0 / std::tanh(x);
        }
        const double wt = trapezoid_weight(i, n, grid.spacing()) * j[i] / std::numbers::pi;
        nodes.push_back({w, wt * coth, wt});
    }
    std::vector<complex> c(tg.size());
    for (std::size_t k = 0; k < tg.size(); ++k) {
        const double t = tg[k];
        double re = 0.0;
        double im = 0.0;
        for (const auto& nd : nodes) {
            re += nd.weight_cos * std::cos(nd.omega * t);
            im -= nd.weight_sin * std::sin(nd.omega * t);
        }
        c[k] = {re, im};
    }
    return CorrelationFunction(tg, std::move(c));
}

/// Splits the support of J into n_modes equal-width bins, one mode per bin at
/// its midpoint with c_j^2 = (1/pi) int_bin J. J is integrated exactly as its
/// piecewise-linear interpolant, so sum_j c_j^2 does not depend on n_modes.
/// Mode linewidths default to the bin width.
inline DiscretizedBath discretize_bath(const RealSpectrum& j, std::size_t n_modes,
                                       std::optional<double> gamma_mode = std::nullopt)
{
    if (n_modes < 1)
        throw ValidationError("n_modes must be >= 1");
    const auto& grid = j.grid();
    const auto v = j.values();
    const std::size_t n = v.size();
    std::size_t first = n;
    std::size_t last = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] < 0.0)
            throw ValidationError("spectral density must be nonnegative");
        if (v[i] > 0.0) {
            first = std::min(first, i);
            last = i;
        }
    }
    if (first == n)
        throw ValidationError("spectral density is identically zero; nothing to discretize");
    const std::size_t lo = first > 0 ? first - 1 : 0;
    const std::size_t hi = std::min(last + 1, n - 1);
    const double x0 = grid[lo];
    const double x1 = grid[hi];
    if (x0 < 0.0)
        throw ValidationError("spectral density must vanish at negative frequencies");
    if (!(x1 > x0))
        throw ValidationError("spectral density support has zero width");

    // prefix[k] = int_{grid[0]}^{grid[k]} J
    std::vector<double> prefix(n, 0.0);
    for (std::size_t k = 1; k < n; ++k)
        prefix[k] = prefix[k - 1] + 0.5 * (v[k - 1] + v[k]) * grid.spacing();
    const auto cumulative = [&](double x) {
        if (x <= grid[0])
            return 0.0;
        if (x >= grid[n - 1])
            return prefix[n - 1];
        std::size_t k = static_cast<std::size_t>((x - grid[0]) / grid.spacing());
        k = std::min(k, n - 2);
        const double d = x - grid[k];
        const double slope = (v[k + 1] - v[k]) / grid.spacing();
        return prefix[k] + v[k] * d + 0.5 * slope * d * d;
    };

    const double width = (x1 - x0) / static_cast<double>(n_modes);
    const double gamma = gamma_mode.value_or(width);
    if (!std::isfinite(gamma) || !(gamma > 0.0))
        throw ValidationError("gamma_mode must be > 0");
    std::vector<BathMode> modes;
    modes.reserve(n_modes);
    double left = x0;
    double f_left = cumulative(x0);
    for (std::size_t m = 0; m < n_modes; ++m) {
        const double right = m + 1 == n_modes ? x1 : x0 + static_cast<double>(m + 1) * width;
        const double f_right = cumulative(right);
        const double c2 = std::max(0.0, f_right - f_left) / std::numbers::pi;
        modes.push_back({0.5 * (left + right), std::sqrt(c2), gamma});
        left = right;
        f_left = f_right;
    }
    return DiscretizedBath(std::move(modes));
}

/// Exact bath of a set of uphill transitions: one mode per line with
/// c^2 = (p_y - p_z) weight and the line's own width. Its self-energy equals
/// -chi_multilevel of the same set.
inline DiscretizedBath bath_from_transitions(const TransitionSet& ts)
{
    std::vector<BathMode> modes;
    for (const auto& t : ts) {
        if (!(t.omega_zy > 0.0))
            throw ValidationError("bath_from_transitions needs uphill transitions (omega_zy > 0)");
        const double dp = t.population_difference();
        if (dp < 0.0)
            throw ValidationError("bath_from_transitions: inverted transition at omega = " +
                                  std::to_string(t.omega_zy));
        modes.push_back({t.omega_zy, std::sqrt(dp * t.weight), t.gamma});
    }
    return DiscretizedBath(std::move(modes));
}

} // namespace polarispec

#endif // POLARISPEC_BATHMAP_HPP
