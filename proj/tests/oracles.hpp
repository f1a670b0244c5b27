// Test-side oracles, independent of the library implementation paths they check.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracles {

/// Adaptive double-exponential quadrature (Boost.Math) on [a, b].
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12) {
    boost::math::quadrature::tanh_sinh<double> q(12);
    return q.integrate(std::forward<F>(f), a, b, tol);
}

/// E_alpha(-z) by fixed-Talbot inversion of the transform s^{alpha-1}/(s^alpha + z)
/// evaluated at t = 1. Entirely different algorithm from the library's
/// series/integral branches; absolute accuracy ~1e-11 in double precision for
/// the parameter ranges used in the tests. Validated in-test against the
/// closed forms at alpha = 1 and alpha = 1/2 before use.
inline double mittag_leffler_talbot(double alpha, double z, int M = 32) {
    if (z == 0.0) return 1.0;
    using cd = std::complex<double>;
    const double t = 1.0;
    const double r = 2.0 * M / (5.0 * t);
    auto F = [&](cd s) { return std::pow(s, alpha - 1.0) / (std::pow(s, alpha) + z); };
    double sum = 0.5 * std::exp(r * t) * F(cd(r, 0.0)).real();
    for (int k = 1; k < M; ++k) {
        const double theta = k * M_PI / M;
        const double cot = std::cos(theta) / std::sin(theta);
        const cd s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        const cd val = std::exp(s * t) * F(s) * cd(1.0, sigma);
        sum += val.real();
    }
    return sum * r / M;
}

/// The stated extended-precision Taylor oracle: 200-term long-double sum of
/// sum_k (-z)^k / Gamma(alpha k + 1). Only valid where the series is
/// conditioned (small z); the tests use it exactly there.
inline double mittag_leffler_taylor_ld(double alpha, double z, int terms = 200) {
    long double sum = 0.0L;
    long double zk = 1.0L;
    for (int k = 0; k < terms; ++k) {
        sum += zk / std::tgammal(static_cast<long double>(alpha) * k + 1.0L);
        zk *= -static_cast<long double>(z);
    }
    return static_cast<double>(sum);
}

/// Discrete log-log least squares slope (reference for exponent fits).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracles
