#ifndef POLARISPEC_SPECTRA_HPP
#define POLARISPEC_SPECTRA_HPP

// Photon retarded Green function and transmission/reflection/absorption of a
// two-port cavity. Two routes: the susceptibility (self-energy -chi) closed
// form, and an explicit finite bath of harmonic modes solved as a
// single-excitation arrowhead matrix, with a Landauer trace as a cross-check.

#include "bathmap.hpp"
#include "core.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace polarispec
{

struct CavityParams
{
    double omega_ph = 0.0;
    double kappa_L = 0.0;
    double kappa_R = 0.0;

    double kappa() const { return kappa_L + kappa_R; }

    void validate() const
    {
        if (!std::isfinite(omega_ph))
            throw ValidationError("cavity omega_ph must be finite");
        if (!std::isfinite(kappa_L) || kappa_L < 0.0 || !std::isfinite(kappa_R) || kappa_R < 0.0)
            throw ValidationError("cavity escape rates kappa_L, kappa_R must be >= 0");
        if (!(kappa() > 0.0))
            throw ValidationError("cavity needs kappa_L + kappa_R > 0");
    }
};

/// D^R(w) on a frequency grid.
class GreenFunction
{
public:
    explicit GreenFunction(ComplexSpectrum d) : d_(std::move(d)) {}

    const FrequencyGrid& grid() const { return d_.grid(); }
    const ComplexSpectrum& spectrum() const { return d_; }
    const complex& operator[](std::size_t i) const { return d_[i]; }
    std::size_t size() const { return d_.size(); }

private:
    ComplexSpectrum d_;
};

inline constexpr double singular_denominator = 1e-14;

/// D^R(w) = 1/(w - w_ph + i kappa/2 + chi(w)).
inline GreenFunction photon_green_function(const ComplexSpectrum& chi, const CavityParams& cav)
{
    cav.validate();
    const auto& grid = chi.grid();
    std::vector<complex> d(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const complex den = complex(grid[i] - cav.omega_ph, 0.5 * cav.kappa()) + chi[i];
        if (std::abs(den) < singular_denominator)
            throw NumericalError("photon Green function denominator vanishes at omega = " +
                                 std::to_string(grid[i]));
        d[i] = 1.0 / den;
    }
    return GreenFunction(ComplexSpectrum(grid, std::move(d)));
}

inline TraSpectra spectra_from_green(const GreenFunction& d, const CavityParams& cav)
{
    cav.validate();
    const auto& grid = d.grid();
    const double kl = cav.kappa_L;
    const double kr = cav.kappa_R;
    const double k = cav.kappa();
    std::vector<double> t(grid.size()), r(grid.size()), a(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double abs2 = std::norm(d[i]);
        const double im = d[i].imag();
        t[i] = kl * kr * abs2;
        r[i] = 1.0 + 2.0 * kl * im + kl * kl * abs2;
        a[i] = -kl * (k * abs2 + 2.0 * im);
    }
    return TraSpectra(RealSpectrum(grid, std::move(t)), RealSpectrum(grid, std::move(r)),
                      RealSpectrum(grid, std::move(a)));
}

/// T = kL kR/|den|^2, A = 2 kL Im chi/|den|^2, R = 1 - T - A with
/// den = w - w_ph + i kappa/2 + chi.
inline TraSpectra spectra_harmonic(const ComplexSpectrum& chi, const CavityParams& cav)
{
    cav.validate();
    const auto& grid = chi.grid();
    std::vector<double> t(grid.size()), r(grid.size()), a(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double den2 = std::norm(complex(grid[i] - cav.omega_ph, 0.5 * cav.kappa()) + chi[i]);
        if (den2 < singular_denominator * singular_denominator)
            throw NumericalError("cavity response denominator vanishes at omega = " + std::to_string(grid[i]));
        t[i] = cav.kappa_L * cav.kappa_R / den2;
        a[i] = 2.0 * cav.kappa_L * chi[i].imag() / den2;
        r[i] = 1.0 - t[i] - a[i];
    }
    return TraSpectra(RealSpectrum(grid, std::move(t)), RealSpectrum(grid, std::move(r)),
                      RealSpectrum(grid, std::move(a)));
}

namespace detail
{
// w 1 - H for the single-excitation arrowhead Hamiltonian: photon first, then
// the bath modes. Off-diagonal couplings enter as -c_j in H; only |c_j|^2
// matters for the photon entry.
inline Eigen::MatrixXcd resolvent_matrix(const DiscretizedBath& bath, const CavityParams& cav, double omega)
{
    const auto modes = bath.modes();
    const Eigen::Index n = static_cast<Eigen::Index>(modes.size()) + 1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    m(0, 0) = complex(omega - cav.omega_ph, 0.5 * cav.kappa());
    for (Eigen::Index j = 1; j < n; ++j) {
        const auto& mode = modes[static_cast<std::size_t>(j - 1)];
        m(j, j) = complex(omega - mode.omega, 0.5 * mode.gamma);
        m(0, j) = mode.coupling;
        m(j, 0) = mode.coupling;
    }
    return m;
}
} // namespace detail

/// D^R(w) = [(w - H)^{-1}]_00 for a photon coupled to a finite harmonic bath,
/// one dense LU solve per frequency.
inline GreenFunction green_finite_n(const DiscretizedBath& bath, const CavityParams& cav, const FrequencyGrid& grid)
{
    cav.validate();
    const Eigen::Index n = static_cast<Eigen::Index>(bath.size()) + 1;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs(0) = 1.0;
    std::vector<complex> d(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto m = detail::resolvent_matrix(bath, cav, grid[i]);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
        const Eigen::VectorXcd x = lu.solve(rhs);
        if (!std::isfinite(std::abs(x(0))))
            throw NumericalError("singular finite-N resolvent at omega = " + std::to_string(grid[i]));
        d[i] = x(0);
    }
    return GreenFunction(ComplexSpectrum(grid, std::move(d)));
}

/// Closed 2x2 inverse for a single mode at w_e, width gamma, coupling c:
/// D = (w - w_e + i gamma/2) / [(w - w_ph + i kappa/2)(w - w_e + i gamma/2) - c^2].
inline GreenFunction green_single_mode(double coupling, double omega_e, double gamma, const CavityParams& cav,
                                       const FrequencyGrid& grid)
{
    cav.validate();
    std::vector<complex> d(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const complex de = complex(grid[i] - omega_e, 0.5 * gamma);
        const complex dp = complex(grid[i] - cav.omega_ph, 0.5 * cav.kappa());
        d[i] = de / (dp * de - coupling * coupling);
    }
    return GreenFunction(ComplexSpectrum(grid, std::move(d)));
}

/// T(w) = Tr[Gamma_L G^dagger Gamma_R G] over the full finite-N resolvent,
/// with port matrices Gamma_L = diag(kappa_L, 0, ...), Gamma_R = diag(kappa_R, 0, ...).
inline RealSpectrum landauer_transmission(const DiscretizedBath& bath, const CavityParams& cav,
                                          const FrequencyGrid& grid)
{
    cav.validate();
    const Eigen::Index n = static_cast<Eigen::Index>(bath.size()) + 1;
    Eigen::VectorXd port_l = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd port_r = Eigen::VectorXd::Zero(n);
    port_l(0) = cav.kappa_L;
    port_r(0) = cav.kappa_R;
    std::vector<double> t(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Eigen::MatrixXcd g = detail::resolvent_matrix(bath, cav, grid[i]).inverse();
        double sum = 0.0;
        for (Eigen::Index a = 0; a < n; ++a) {
            if (port_l(a) == 0.0)
                continue;
            for (Eigen::Index b = 0; b < n; ++b)
                if (port_r(b) != 0.0)
                    sum += port_l(a) * port_r(b) * std::norm(g(b, a));
        }
        t[i] = sum;
    }
    return RealSpectrum(grid, std::move(t));
}

/// A finite bath sampled from Im chi. For grids reaching omega <= 0 (RWA
/// detunings) every frequency is moved up by `offset` so that J lives on
/// positive frequencies; spectra are translation invariant under the RWA.
struct FiniteNRealization
{
    DiscretizedBath bath;
    double offset = 0.0;
};

inline FiniteNRealization finite_n_bath_from_chi(const ComplexSpectrum& chi, std::size_t n_modes,
                                                 std::optional<double> gamma_mode = std::nullopt)
{
    const auto& grid = chi.grid();
    const double offset = grid.omega_min() > 0.0 ? 0.0 : grid.spacing() - grid.omega_min();
    std::vector<double> j(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (chi[i].imag() < 0.0)
            throw ValidationError("finite-N method needs a passive medium (Im chi >= 0)");
        j[i] = chi[i].imag();
    }
    const RealSpectrum spectral(grid.shifted(offset), std::move(j));
    return {discretize_bath(spectral, n_modes, gamma_mode), offset};
}

inline GreenFunction green_finite_n_from_chi(const ComplexSpectrum& chi, const CavityParams& cav,
                                             std::size_t n_modes, std::optional<double> gamma_mode = std::nullopt)
{
    const auto real = finite_n_bath_from_chi(chi, n_modes, gamma_mode);
    CavityParams shifted = cav;
    shifted.omega_ph += real.offset;
    const auto d = green_finite_n(real.bath, shifted, chi.grid().shifted(real.offset));
    const auto values = d.spectrum().values();
    return GreenFunction(ComplexSpectrum(chi.grid(), std::vector<complex>(values.begin(), values.end())));
}

} // namespace polarispec

#endif // POLARISPEC_SPECTRA_HPP
