#ifndef POLARISPEC_TESTS_ORACLES_HPP
#define POLARISPEC_TESTS_ORACLES_HPP

// Reference implementations used only by the tests. They share no code with
// the library: adaptive Gauss-Kronrod quadrature, and w(z) from its power
// series, its Laplace continued fraction and its integral representation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <queue>
#include <vector>

namespace oracle
{

using complex = std::complex<double>;

namespace detail
{
// 15-point Kronrod rule with its embedded 7-point Gauss rule.
inline constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                  0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                  0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                  0.207784955007898467600689403773245, 0.0};
inline constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                  0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                  0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                  0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                 0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment
{
    double a, b;
    complex value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

inline Segment gk15(const std::function<complex(double)>& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const complex fc = f(c);
    complex kron = wgk[7] * fc;
    complex gauss = wg[3] * fc;
    for (int k = 0; k < 7; ++k) {
        const complex s = f(c - h * xgk[k]) + f(c + h * xgk[k]);
        kron += wgk[k] * s;
        if (k % 2 == 1)
            gauss += wg[k / 2] * s;
    }
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}
} // namespace detail

/// Globally adaptive Gauss-Kronrod integration of a complex integrand on [a, b].
inline complex integrate(const std::function<complex(double)>& f, double a, double b, double rel_tol = 1e-13,
                         double abs_tol = 1e-300, int max_segments = 200000)
{
    std::priority_queue<detail::Segment> heap;
    // Start from a uniform partition so narrow features are not missed.
    constexpr int initial = 64;
    complex total = 0.0;
    double error = 0.0;
    for (int k = 0; k < initial; ++k) {
        const double lo = a + (b - a) * k / initial;
        const double hi = k + 1 == initial ? b : a + (b - a) * (k + 1) / initial;
        auto s = detail::gk15(f, lo, hi);
        total += s.value;
        error += s.error;
        heap.push(s);
    }
    int segments = initial;
    while (error > std::max(abs_tol, rel_tol * std::abs(total)) && segments < max_segments) {
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++segments;
    }
    // Re-sum to drop the running-update rounding.
    complex sum = 0.0;
    std::vector<detail::Segment> all;
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    for (const auto& s : all)
        sum += s.value;
    return sum;
}

inline double integrate_real(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-13)
{
    return integrate([&](double x) { return complex(f(x), 0.0); }, a, b, rel_tol).real();
}

/// w(z) = sum_n (iz)^n / Gamma(n/2 + 1); accurate for |z| <~ 2.
inline complex faddeeva_series(complex z)
{
    complex sum = 0.0;
    complex power = 1.0;
    const complex iz = complex(0.0, 1.0) * z;
    for (int n = 0; n < 200; ++n) {
        const complex term = power / std::tgamma(0.5 * n + 1.0);
        sum += term;
        if (n > 10 && std::abs(term) < 1e-18 * std::abs(sum))
            break;
        power *= iz;
    }
    return sum;
}

/// Laplace continued fraction w(z) = (i/sqrt(pi)) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...))))
/// evaluated bottom-up; accurate for Im z > 0 and |z| large.
inline complex faddeeva_continued_fraction(complex z, int depth = 2000)
{
    complex tail = z;
    for (int k = depth; k >= 1; --k)
        tail = z - (0.5 * k) / tail;
    return complex(0.0, 1.0 / std::sqrt(std::numbers::pi)) / tail;
}

/// w(z) = (i/pi) int exp(-t^2)/(z - t) dt for Im z > 0, by adaptive quadrature.
inline complex faddeeva_integral(complex z)
{
    const auto f = [z](double t) { return std::exp(-t * t) / (z - t); };
    const double lo = std::min(-10.0, z.real() - 10.0);
    const double hi = std::max(10.0, z.real() + 10.0);
    return complex(0.0, 1.0 / std::numbers::pi) * integrate(f, lo, hi, 1e-14);
}

} // namespace oracle

#endif // POLARISPEC_TESTS_ORACLES_HPP
