#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fabric/quadrature.hpp"

namespace fabric {

namespace ml_detail {

// The natural conditioning variable is u = z^{1/alpha}: the Taylor series of
// E_alpha(-z) has max term ~ e^u / u, so u bounds the digits lost to
// cancellation, and u is also the decay rate seen by the integral branch.

constexpr double kTaylorMaxU = 14.0;      // max term ~ 8.6e4: long double keeps ~1e-13
constexpr double kAsymptoticMinU = 30.0;  // optimal truncation floor ~ e^-30

/// Power series sum_k (-z)^k / Gamma(alpha k + 1), long-double accumulation.
inline double taylor_series(double alpha, double z) {
    const long double zl = z;
    long double term = 1.0L;  // (-z)^k running power
    long double sum = 0.0L;
    long double comp = 0.0L;
    for (int k = 0; k < 4000; ++k) {
        const long double t = term / std::tgammal(static_cast<long double>(alpha) * k + 1.0L);
        const long double y = t - comp;
        const long double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        term *= -zl;
        if (std::fabs(t) < 1e-25L * std::fabs(sum) && k > 4) break;
    }
    return static_cast<double>(sum);
}

/// Optimally truncated large-z series sum_{k>=1} (-1)^{k+1} z^{-k}/Gamma(1-alpha k).
/// Reciprocal gammas go through the reflection 1/Gamma(1-ak) = sin(pi ak)Gamma(ak)/pi,
/// so pole crossings (integer alpha k) contribute zeros. Truncation is decided on
/// the sin-free envelope z^{-k}Gamma(ak)/pi, which is the quantity with the clean
/// decrease-then-diverge shape; err_bound returns the envelope at the stop.
inline double asymptotic_series(double alpha, double z, double& err_bound) {
    const double lz = std::log(z);
    double sum = 0.0;
    double prev_env = std::numeric_limits<double>::infinity();
    err_bound = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 400; ++k) {
        const double ak = alpha * k;
        const double env = std::exp(-k * lz + std::lgamma(ak) - std::log(M_PI));
        if (env >= prev_env) {
            err_bound = env;  // envelope started to diverge; stop before adding
            return sum;
        }
        const double s = std::sin(M_PI * ak);
        const double sign = ((k % 2 == 1) ? 1.0 : -1.0) * (s >= 0.0 ? 1.0 : -1.0);
        sum += sign * env * std::fabs(s);
        prev_env = env;
        if (env < 1e-17 * std::fabs(sum)) {
            err_bound = env;
            return sum;
        }
    }
    err_bound = prev_env;
    return sum;
}

/// Spectral representation E_alpha(-z) = int_0^inf K(r) e^{-r u} dr with
/// u = z^{1/alpha} and the positive kernel
///   K(r) = (1/pi) r^{alpha-1} sin(alpha pi) / (r^{2 alpha} + 2 r^alpha cos(alpha pi) + 1).
/// Substituting v = r^alpha removes the endpoint singularity exactly:
///   E_alpha(-z) = (sin(alpha pi) / (alpha pi))
///                 int_0^inf e^{-u v^{1/alpha}} / ((v + cos(alpha pi))^2 + sin^2(alpha pi)) dv,
/// a smooth Lorentzian-type integrand. Panels track the e^{-u v^{1/alpha}}
/// boundary layer and, for alpha near 1, the narrow Lorentzian peak at
/// v = -cos(alpha pi).
inline double spectral_integral(double alpha, double z) {
    const double u = std::pow(z, 1.0 / alpha);
    const double sa = std::sin(M_PI * alpha);
    const double ca = std::cos(M_PI * alpha);
    auto integrand = [&](double v) {
        const double dv = v + ca;
        return std::exp(-u * std::pow(v, 1.0 / alpha)) / (dv * dv + sa * sa);
    };

    const double vmax = std::pow(45.0 / u, alpha);  // e^{-45} tail
    std::vector<double> pts{0.0};
    for (double p = std::pow(1.0 / u, alpha); p < vmax; p *= 4.0) pts.push_back(p);
    if (ca < 0.0) {
        const double v0 = -ca;  // Lorentzian peak, width sa
        for (double p : {v0 - 20.0 * sa, v0 - 3.0 * sa, v0 + 3.0 * sa, v0 + 20.0 * sa})
            if (p > 0.0 && p < vmax) pts.push_back(p);
    }
    pts.push_back(vmax);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return sa / (alpha * M_PI) * tanh_sinh_panels(integrand, pts, 1e-14, 11);
}

}  // namespace ml_detail

/// E_alpha(-z) for alpha in (0,1] and z >= 0.
///
/// Crossover (in the conditioning variable u = z^{1/alpha}):
///   u <= 14            power series, long-double compensated summation
///   u >= 30            optimally truncated 1/z series, accepted only when its
///                      own truncation bound and (for alpha > 2/3) the size of
///                      the subdominant exponential e^{u cos(pi/alpha)} are
///                      below 1e-12 of the result
///   everything else    spectral integral (positive kernel, double-exponential
///                      quadrature)
/// Absolute accuracy target 1e-10 on z in [0, 50], all alpha in (0,1].
inline double mittag_leffler(double alpha, double z) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::domain_error("mittag_leffler: alpha must lie in (0,1]");
    if (!(z >= 0.0)) throw std::domain_error("mittag_leffler: argument must be >= 0");
    if (z == 0.0) return 1.0;
    if (alpha == 1.0) return std::exp(-z);

    const double u = std::pow(z, 1.0 / alpha);
    if (u <= ml_detail::kTaylorMaxU) return ml_detail::taylor_series(alpha, z);

    if (u >= ml_detail::kAsymptoticMinU) {
        double bound;
        const double s = ml_detail::asymptotic_series(alpha, z, bound);
        bool exp_negligible = alpha <= 2.0 / 3.0 + 1e-12;
        if (!exp_negligible) {
            // subdominant exponential pair ~ e^{u cos(pi/alpha)} for 2/3 < alpha < 1
            exp_negligible = u * std::cos(M_PI / alpha) <= -30.0;
        }
        if (exp_negligible && bound <= 1e-12 * std::max(std::fabs(s), 1e-4)) return s;
    }
    return ml_detail::spectral_integral(alpha, z);
}

}  // namespace fabric
