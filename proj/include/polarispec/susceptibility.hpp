#ifndef POLARISPEC_SUSCEPTIBILITY_HPP
#define POLARISPEC_SUSCEPTIBILITY_HPP

// Molecular linear susceptibility chi(w) for the ensemble model families
// (thermal two-level systems, inhomogeneous disorder, vibronic progressions,
// multilevel emitters, tabulated data), plus the conversions from a spectral
// density J(w) and from a dipole correlation function C2(t).
//
// Sign convention: chi(w) = -sum (p_y - p_z) |lambda mu_zy|^2 / (w - w_zy + i gamma/2),
// so a passive medium has Im chi >= 0 and the photon self-energy is -chi.

#include "core.hpp"
#include "faddeeva.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace polarispec
{

/// Inverse temperature with an explicit zero-temperature state. beta = inf is
/// a flag, not a float, so that tanh/coth factors are exactly 1 there.
class InverseTemperature
{
public:
    InverseTemperature() = default; // T = 0

    static InverseTemperature zero_temperature() { return {}; }

    static InverseTemperature finite(double beta)
    {
        if (!std::isfinite(beta) || beta < 0.0)
            throw ValidationError("inverse temperature must be finite and >= 0 (population inversion "
                                  "is not a thermal state); use zero_temperature() for beta = inf");
        InverseTemperature b;
        b.beta_ = beta;
        return b;
    }

    bool is_infinite() const { return !beta_.has_value(); }
    double value() const { return beta_.value_or(std::numeric_limits<double>::infinity()); }

    // p_g - p_e = tanh(beta w / 2) for a two-level transition at w. At T = 0
    // the lower level is fully occupied; a zero-frequency transition (rotating
    // frame) counts as uphill.
    double population_difference(double omega) const
    {
        if (!beta_)
            return omega < 0.0 ? -1.0 : 1.0;
        return std::tanh(0.5 * *beta_ * omega);
    }

    // (p_lower, p_upper) for a two-level system with gap |w|.
    std::pair<double, double> two_level_populations(double omega) const
    {
        if (!beta_)
            return {1.0, 0.0};
        const double x = std::exp(-*beta_ * std::abs(omega));
        return {1.0 / (1.0 + x), x / (1.0 + x)};
    }

    friend bool operator==(const InverseTemperature&, const InverseTemperature&) = default;

private:
    std::optional<double> beta_;
};

/// One term of the spectral sum: |y> -> |z> at w_zy with coupling weight
/// |lambda <z|mu|y>|^2 and populations p_y, p_z.
struct Transition
{
    double omega_zy = 0.0;
    double weight = 0.0;
    double p_y = 1.0;
    double p_z = 0.0;
    double gamma = 0.0;

    void validate() const
    {
        if (!std::isfinite(omega_zy))
            throw ValidationError("transition frequency must be finite");
        if (!std::isfinite(weight) || weight < 0.0)
            throw ValidationError("transition weight must be >= 0");
        if (!(p_y >= 0.0 && p_y <= 1.0) || !(p_z >= 0.0 && p_z <= 1.0))
            throw ValidationError("transition populations must lie in [0, 1]");
        if (!std::isfinite(gamma) || !(gamma > 0.0))
            throw ValidationError("transition linewidth gamma must be > 0");
    }

    double population_difference() const { return p_y - p_z; }
};

class TransitionSet
{
public:
    explicit TransitionSet(std::vector<Transition> transitions) : transitions_(std::move(transitions))
    {
        if (transitions_.empty())
            throw ValidationError("transition set is empty");
        for (const auto& t : transitions_)
            t.validate();
    }

    std::span<const Transition> transitions() const { return transitions_; }
    std::size_t size() const { return transitions_.size(); }
    auto begin() const { return transitions_.begin(); }
    auto end() const { return transitions_.end(); }

private:
    std::vector<Transition> transitions_;
};

// Adds the reverse process (z -> y at -w_zy, populations swapped) for every
// entry, giving the complete ordered-pair list of the spectral decomposition.
// Model builders emit only uphill (RWA) entries.
inline TransitionSet two_sided(const TransitionSet& ts)
{
    std::vector<Transition> out(ts.begin(), ts.end());
    for (const auto& t : ts)
        out.push_back({-t.omega_zy, t.weight, t.p_z, t.p_y, t.gamma});
    return TransitionSet(std::move(out));
}

struct TlsEnsemble
{
    double n_emitters = 1.0;
    double g = 0.0;
    double omega_exc = 0.0;
    InverseTemperature beta{};
    double gamma = 0.0;

    void validate() const
    {
        if (!std::isfinite(n_emitters) || !(n_emitters > 0.0))
            throw ValidationError("n_emitters must be > 0");
        if (!std::isfinite(g) || g < 0.0)
            throw ValidationError("coupling g must be >= 0");
        if (!std::isfinite(omega_exc))
            throw ValidationError("omega_exc must be finite");
        if (!std::isfinite(gamma) || !(gamma > 0.0))
            throw ValidationError("linewidth gamma must be > 0");
    }

    double collective_weight() const { return n_emitters * g * g; }
};

enum class DisorderKind
{
    gaussian,
    lorentzian
};

struct DisorderSpec
{
    DisorderKind kind = DisorderKind::gaussian;
    double center = 0.0;
    double sigma = 1.0; // Gaussian standard deviation, or Lorentzian FWHM

    void validate() const
    {
        if (!std::isfinite(center))
            throw ValidationError("disorder center must be finite");
        if (!std::isfinite(sigma) || !(sigma > 0.0))
            throw ValidationError("disorder width sigma must be > 0");
    }
};

struct VibronicModel
{
    double n_emitters = 1.0;
    double g = 0.0;
    double omega_exc = 0.0; // vertical transition
    double omega_v = 1.0;
    double huang_rhys = 0.0;
    double gamma = 0.0;
    std::optional<int> m_max;

    void validate() const
    {
        if (!std::isfinite(n_emitters) || !(n_emitters > 0.0))
            throw ValidationError("n_emitters must be > 0");
        if (!std::isfinite(g) || g < 0.0)
            throw ValidationError("coupling g must be >= 0");
        if (!std::isfinite(omega_exc))
            throw ValidationError("omega_exc must be finite");
        if (!std::isfinite(omega_v) || !(omega_v > 0.0))
            throw ValidationError("vibrational frequency omega_v must be > 0");
        if (!std::isfinite(huang_rhys) || huang_rhys < 0.0)
            throw ValidationError("Huang-Rhys factor must be >= 0");
        if (!std::isfinite(gamma) || !(gamma > 0.0))
            throw ValidationError("linewidth gamma must be > 0");
        if (m_max && *m_max < 0)
            throw ValidationError("m_max must be >= 0");
    }
};

struct Level
{
    double omega = 0.0;
    double population = 0.0;
};

// Transition dipole between levels `a` and `b` (0-based indices, unordered).
struct Dipole
{
    std::size_t a = 0;
    std::size_t b = 0;
    double amplitude = 1.0;
};

/// Identical multilevel emitters with arbitrary stationary populations.
struct MultilevelModel
{
    std::vector<Level> levels;
    std::vector<Dipole> dipoles;
    double n_emitters = 1.0;
    double g = 0.0;
    double gamma = 0.0;

    static constexpr double population_tolerance = 1e-12;

    void validate() const
    {
        if (levels.empty())
            throw ValidationError("multilevel model needs at least one level");
        double total = 0.0;
        for (const auto& l : levels) {
            if (!std::isfinite(l.omega))
                throw ValidationError("level frequency must be finite");
            if (!(l.population >= 0.0 && l.population <= 1.0))
                throw ValidationError("level populations must lie in [0, 1]");
            total += l.population;
        }
        if (std::abs(total - 1.0) > population_tolerance)
            throw ValidationError("level populations must sum to 1 (got " + std::to_string(total) + ")");
        for (std::size_t i = 0; i < dipoles.size(); ++i) {
            const auto& d = dipoles[i];
            if (d.a >= levels.size() || d.b >= levels.size() || d.a == d.b)
                throw ValidationError("dipole " + std::to_string(i) + " references invalid levels");
            if (!std::isfinite(d.amplitude))
                throw ValidationError("dipole amplitudes must be finite");
            if (levels[d.a].omega == levels[d.b].omega)
                throw ValidationError("dipole between degenerate levels has no uphill direction");
            for (std::size_t j = 0; j < i; ++j) {
                const auto& e = dipoles[j];
                if ((e.a == d.a && e.b == d.b) || (e.a == d.b && e.b == d.a))
                    throw ValidationError("dipole pair listed twice");
            }
        }
        if (!std::isfinite(n_emitters) || !(n_emitters > 0.0))
            throw ValidationError("n_emitters must be > 0");
        if (!std::isfinite(g) || g < 0.0)
            throw ValidationError("coupling g must be >= 0");
        if (!std::isfinite(gamma) || !(gamma > 0.0))
            throw ValidationError("linewidth gamma must be > 0");
    }
};

/// Susceptibility known only as samples, e.g. read from `omega,re_chi,im_chi`.
/// Linearly interpolated onto the requested grid; no extrapolation.
struct TabulatedChi
{
    std::vector<double> omega;
    std::vector<complex> chi;

    void validate() const
    {
        if (omega.size() < 2 || omega.size() != chi.size())
            throw ValidationError("tabulated chi needs at least two (omega, chi) rows");
        for (std::size_t i = 0; i < omega.size(); ++i) {
            if (!std::isfinite(omega[i]) || !std::isfinite(chi[i].real()) || !std::isfinite(chi[i].imag()))
                throw ValidationError("tabulated chi contains non-finite values");
            if (i > 0 && !(omega[i] > omega[i - 1]))
                throw ValidationError("tabulated chi frequencies must be strictly increasing");
        }
    }
};

struct DisorderedTls
{
    TlsEnsemble ensemble;
    DisorderSpec disorder;
};

using EnsembleModel = std::variant<TlsEnsemble, DisorderedTls, VibronicModel, MultilevelModel, TabulatedChi>;

// ---------------------------------------------------------------------------
// Transition sets of the model families (uphill entries only).

inline TransitionSet rwa_transitions(const TlsEnsemble& m)
{
    m.validate();
    const auto [p_lower, p_upper] = m.beta.two_level_populations(m.omega_exc);
    return TransitionSet({{m.omega_exc, m.collective_weight(), p_lower, p_upper, m.gamma}});
}

/// Poisson (Franck-Condon) weight e^{-S} S^m / m!.
inline double franck_condon_weight(double huang_rhys, int m)
{
    if (huang_rhys == 0.0)
        return m == 0 ? 1.0 : 0.0;
    return std::exp(-huang_rhys + m * std::log(huang_rhys) - std::lgamma(m + 1.0));
}

inline constexpr double vibronic_tail_tolerance = 1e-12;
inline constexpr int vibronic_max_order = 200;

// Smallest m_max whose neglected Poisson tail is below 1e-12, capped at 200.
inline int vibronic_truncation(double huang_rhys)
{
    double cumulative = 0.0;
    for (int m = 0; m <= vibronic_max_order; ++m) {
        cumulative += franck_condon_weight(huang_rhys, m);
        if (1.0 - cumulative < vibronic_tail_tolerance)
            return m;
    }
    return vibronic_max_order;
}

inline std::vector<double> franck_condon_weights(const VibronicModel& m)
{
    const int m_max = m.m_max.value_or(vibronic_truncation(m.huang_rhys));
    std::vector<double> w(static_cast<std::size_t>(m_max) + 1);
    for (int k = 0; k <= m_max; ++k)
        w[static_cast<std::size_t>(k)] = franck_condon_weight(m.huang_rhys, k);
    return w;
}

inline TransitionSet rwa_transitions(const VibronicModel& m)
{
    m.validate();
    const double base = m.n_emitters * m.g * m.g;
    const auto fc = franck_condon_weights(m);
    std::vector<Transition> out;
    out.reserve(fc.size());
    for (std::size_t k = 0; k < fc.size(); ++k) {
        const double omega = m.omega_exc - m.huang_rhys * m.omega_v + static_cast<double>(k) * m.omega_v;
        out.push_back({omega, base * fc[k], 1.0, 0.0, m.gamma});
    }
    return TransitionSet(std::move(out));
}

inline TransitionSet rwa_transitions(const MultilevelModel& m)
{
    m.validate();
    if (m.dipoles.empty())
        throw ValidationError("multilevel model has no dipole-allowed transitions");
    const double scale = m.n_emitters * m.g * m.g;
    std::vector<Transition> out;
    for (const auto& d : m.dipoles) {
        auto lo = d.a;
        auto hi = d.b;
        if (m.levels[lo].omega > m.levels[hi].omega)
            std::swap(lo, hi);
        out.push_back({m.levels[hi].omega - m.levels[lo].omega, scale * d.amplitude * d.amplitude,
                       m.levels[lo].population, m.levels[hi].population, m.gamma});
    }
    return TransitionSet(std::move(out));
}

// Transition data where the model has it (not for disorder or tabulated chi).
inline std::optional<TransitionSet> rwa_transitions(const EnsembleModel& model)
{
    return std::visit(
        [](const auto& m) -> std::optional<TransitionSet> {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, TlsEnsemble> || std::is_same_v<M, VibronicModel> ||
                          std::is_same_v<M, MultilevelModel>)
                return rwa_transitions(m);
            else
                return std::nullopt;
        },
        model);
}

// ---------------------------------------------------------------------------
// Susceptibilities.

inline ComplexSpectrum chi_multilevel(const TransitionSet& ts, const FrequencyGrid& grid)
{
    std::vector<complex> chi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid[i];
        complex sum{0.0, 0.0};
        for (const auto& t : ts) {
            const double dp = t.population_difference();
            if (dp == 0.0)
                continue;
            sum -= dp * t.weight / complex(w - t.omega_zy, 0.5 * t.gamma);
        }
        chi[i] = sum;
    }
    return ComplexSpectrum(grid, std::move(chi));
}

inline ComplexSpectrum chi_tls_thermal(const TlsEnsemble& m, const FrequencyGrid& grid)
{
    m.validate();
    const double strength = m.collective_weight() * m.beta.population_difference(m.omega_exc);
    std::vector<complex> chi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        chi[i] = -strength / complex(grid[i] - m.omega_exc, 0.5 * m.gamma);
    return ComplexSpectrum(grid, std::move(chi));
}

/// Zero-temperature two-level ensemble with a distribution of excitation
/// frequencies. The ensemble's omega_exc is replaced by the disorder center.
///   Lorentzian (FWHM sigma): -N g^2 / (w - center + i(gamma + sigma)/2)
///   Gaussian (std sigma):     i N g^2 sqrt(pi/2)/sigma * w(z),
///                             z = (w - center + i gamma/2)/(sigma sqrt 2)
inline ComplexSpectrum chi_disordered(const TlsEnsemble& m, const DisorderSpec& d, const FrequencyGrid& grid)
{
    m.validate();
    d.validate();
    if (!m.beta.is_infinite())
        throw ValidationError("disordered ensembles are defined at T = 0 (beta = inf)");
    const double strength = m.collective_weight();
    std::vector<complex> chi(grid.size());
    if (d.kind == DisorderKind::lorentzian) {
        for (std::size_t i = 0; i < grid.size(); ++i)
            chi[i] = -strength / complex(grid[i] - d.center, 0.5 * (m.gamma + d.sigma));
    } else {
        const double norm = std::sqrt(0.5 * std::numbers::pi) / d.sigma;
        const double scale = 1.0 / (d.sigma * std::numbers::sqrt2);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const complex z = complex(grid[i] - d.center, 0.5 * m.gamma) * scale;
            chi[i] = I * strength * norm * faddeeva(z);
        }
    }
    return ComplexSpectrum(grid, std::move(chi));
}

inline ComplexSpectrum chi_vibronic(const VibronicModel& m, const FrequencyGrid& grid)
{
    return chi_multilevel(rwa_transitions(m), grid);
}

inline ComplexSpectrum chi_three_level(const MultilevelModel& m, const FrequencyGrid& grid)
{
    if (m.levels.size() != 3)
        throw ValidationError("three-level model needs exactly 3 levels (got " +
                              std::to_string(m.levels.size()) + ")");
    return chi_multilevel(rwa_transitions(m), grid);
}

inline ComplexSpectrum chi_tabulated(const TabulatedChi& tab, const FrequencyGrid& grid)
{
    tab.validate();
    std::vector<complex> chi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid[i];
        if (w < tab.omega.front() || w > tab.omega.back())
            throw ValidationError("frequency " + std::to_string(w) + " lies outside the tabulated chi range");
        const auto it = std::upper_bound(tab.omega.begin(), tab.omega.end(), w);
        std::size_t hi = static_cast<std::size_t>(it - tab.omega.begin());
        if (hi == tab.omega.size())
            hi = tab.omega.size() - 1;
        const std::size_t lo = hi - 1;
        const double t = (w - tab.omega[lo]) / (tab.omega[hi] - tab.omega[lo]);
        chi[i] = t == 0.0 ? tab.chi[lo] : (t == 1.0 ? tab.chi[hi] : (1.0 - t) * tab.chi[lo] + t * tab.chi[hi]);
    }
    return ComplexSpectrum(grid, std::move(chi));
}

inline ComplexSpectrum chi(const EnsembleModel& model, const FrequencyGrid& grid)
{
    return std::visit(
        [&](const auto& m) -> ComplexSpectrum {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, TlsEnsemble>)
                return chi_tls_thermal(m, grid);
            else if constexpr (std::is_same_v<M, DisorderedTls>)
                return chi_disordered(m.ensemble, m.disorder, grid);
            else if constexpr (std::is_same_v<M, VibronicModel>)
                return chi_vibronic(m, grid);
            else if constexpr (std::is_same_v<M, MultilevelModel>)
                return chi_multilevel(rwa_transitions(m), grid);
            else
                return chi_tabulated(m, grid);
        },
        model);
}

namespace detail
{
// int J_lin(x) / (zeta - x) dx over the whole grid of J, with J_lin the
// piecewise-linear interpolant of the samples, Im zeta > 0.
inline complex cauchy_integral_linear(const RealSpectrum& j, complex zeta)
{
    const auto& g = j.grid();
    const auto v = j.values();
    complex total{0.0, 0.0};
    complex log_prev = std::log(zeta - g[0]);
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        const double a = g[k];
        const double b = g[k + 1];
        const complex log_next = std::log(zeta - b);
        if (v[k] != 0.0 || v[k + 1] != 0.0) {
            const complex lg = log_prev - log_next;
            const double slope = (v[k + 1] - v[k]) / (b - a);
            total += v[k] * lg + slope * ((zeta - a) * lg - (b - a));
        }
        log_prev = log_next;
    }
    return total;
}
} // namespace detail

/// chi from a spectral density: chi(w >= 0) = -(1/pi) int J(w')/(w - w' + i gamma_reg/2) dw',
/// chi(-w) = conj chi(w). J is integrated as its piecewise-linear interpolant.
/// gamma_reg defaults to twice J's grid spacing.
inline ComplexSpectrum chi_from_spectral_density(const RealSpectrum& j, const FrequencyGrid& grid,
                                                 std::optional<double> gamma_reg = std::nullopt)
{
    const auto& jg = j.grid();
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (j[k] < 0.0)
            throw ValidationError("spectral density must be nonnegative (negative at omega = " +
                                  std::to_string(jg[k]) + ")");
        if (jg[k] < 0.0 && j[k] != 0.0)
            throw ValidationError("spectral density must vanish at negative frequencies");
    }
    const double reg = gamma_reg.value_or(2.0 * jg.spacing());
    if (!std::isfinite(reg) || !(reg > 0.0))
        throw ValidationError("regularization gamma_reg must be > 0");
    std::vector<complex> chi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = std::abs(grid[i]);
        const complex value = -detail::cauchy_integral_linear(j, complex(w, 0.5 * reg)) / std::numbers::pi;
        chi[i] = grid[i] < 0.0 ? std::conj(value) : value;
    }
    return ComplexSpectrum(grid, std::move(chi));
}

struct ChiFromCorrelation
{
    ComplexSpectrum chi;
    std::optional<std::string> warning;
};

inline constexpr double undamped_correlation_threshold = 1e-3;

/// chi(w) = -[C2(w) + C2*(-w)] with C2(w) = -i int_0^tmax e^{iwt} C2(t) dt.
/// C2 carries the (hbar lambda)^2 prefactor. Without any population
/// difference bookkeeping this yields the full (non-RWA) susceptibility,
/// anti-resonant mirror poles included. A correlation that has not decayed
/// to 1e-3 of |C2(0)| by the end of the window gets a warning.
inline ChiFromCorrelation chi_from_correlation(const ComplexTimeSeries& c2, const FrequencyGrid& grid)
{
    std::vector<complex> chi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const complex plus = one_sided_fourier(c2, grid[i]);
        const complex minus = one_sided_fourier(c2, -grid[i]);
        chi[i] = -(plus + std::conj(minus));
    }
    std::optional<std::string> warning;
    const double start = std::abs(c2[0]);
    const double end = std::abs(c2[c2.size() - 1]);
    if (start > 0.0 && end > undamped_correlation_threshold * start)
        warning = "correlation function has not decayed over the time window (|C2(t_max)|/|C2(0)| = " +
                  std::to_string(end / start) + "); chi is truncation-limited";
    return {ComplexSpectrum(grid, std::move(chi)), std::move(warning)};
}

} // namespace polarispec

#endif // POLARISPEC_SUSCEPTIBILITY_HPP
