#ifndef POLARISPEC_FADDEEVA_HPP
#define POLARISPEC_FADDEEVA_HPP

#include "core.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace polarispec
{

namespace detail
{
// Weideman's rational approximation of w(z) (SIAM J. Numer. Anal. 31, 1994):
//   w(z) = 2 p(Z) / (L - iz)^2 + (1/sqrt(pi)) / (L - iz),  Z = (L + iz)/(L - iz)
// with p a polynomial of degree N-1 whose coefficients are the discrete
// cosine coefficients of exp(-t^2)(L^2 + t^2) under t = L tan(theta/2).
// N = 40 gives ~2e-14 relative error in the closed upper half plane.
struct WeidemanTable
{
    static constexpr int order = 40;
    double scale = 0.0;
    std::array<double, order> coeff{};

    WeidemanTable()
    {
        constexpr int m = 2 * order;
        scale = std::sqrt(order / std::numbers::sqrt2);
        for (int n = 1; n <= order; ++n) {
            double sum = 0.0;
            for (int k = -m + 1; k < m; ++k) {
                const double t = scale * std::tan(0.5 * k * std::numbers::pi / m);
                const double f = std::exp(-t * t) * (scale * scale + t * t);
                sum += f * std::cos(std::numbers::pi * k * n / m);
            }
            coeff[n - 1] = sum / (2.0 * m);
        }
    }
};

inline const WeidemanTable& weideman_table()
{
    static const WeidemanTable table;
    return table;
}
} // namespace detail

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im z >= 0.
inline complex faddeeva(complex z)
{
    if (!(z.imag() >= 0.0))
        throw ValidationError("faddeeva: argument must lie in the closed upper half plane");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw ValidationError("faddeeva: non-finite argument");
    const auto& tab = detail::weideman_table();
    const double L = tab.scale;
    const complex denom = L - I * z;
    const complex Z = (L + I * z) / denom;
    complex p = tab.coeff[detail::WeidemanTable::order - 1];
    for (int n = detail::WeidemanTable::order - 2; n >= 0; --n)
        p = p * Z + tab.coeff[n];
    return 2.0 * p / (denom * denom) + (1.0 / std::sqrt(std::numbers::pi)) / denom;
}

} // namespace polarispec

#endif // POLARISPEC_FADDEEVA_HPP
