#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fabric {

/// Double-exponential (tanh-sinh) quadrature on a finite interval.
/// Endpoint singularities that are integrable are absorbed by the
/// double-exponential weight decay; endpoints themselves are never evaluated.
/// Refines by halving the step until the level-to-level change is below
/// rel_tol (plus a tiny absolute floor).
template <class F>
double tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-13, int max_level = 12) {
    if (!(b > a)) throw std::invalid_argument("tanh_sinh: need a < b");
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double u_max = 6.5;  // tanh(pi/2 sinh 6.5) saturates well past double precision

    auto sample = [&](double u, double& x, double& w) {
        const double s = 0.5 * M_PI * std::sinh(u);
        const double ch = std::cosh(s);
        x = mid + half * std::tanh(s);
        w = half * 0.5 * M_PI * std::cosh(u) / (ch * ch);
    };

    double h = 1.0;
    double x, w;
    sample(0.0, x, w);
    double integral = h * w * f(x);
    for (int j = 1; j * h <= u_max; ++j) {
        for (double u : {j * h, -j * h}) {
            sample(u, x, w);
            if (w <= 0.0 || !(x > a) || !(x < b)) continue;
            integral += h * w * f(x);
        }
    }

    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (int j = 1; (2 * j - 1) * h <= u_max; ++j) {
            const double uj = (2 * j - 1) * h;  // only the new midpoints
            for (double u : {uj, -uj}) {
                sample(u, x, w);
                if (w <= 0.0 || !(x > a) || !(x < b)) continue;
                add += w * f(x);
            }
        }
        const double refined = 0.5 * integral + h * add;
        const double change = std::fabs(refined - integral);
        integral = refined;
        if (level >= 3 && change <= rel_tol * std::fabs(integral) + 1e-305) break;
    }
    return integral;
}

/// tanh_sinh over a list of breakpoints (panels are integrated independently,
/// which keeps endpoint clustering where the integrand needs it).
template <class F>
double tanh_sinh_panels(F&& f, const std::vector<double>& breakpoints, double rel_tol = 1e-13,
                        int max_level = 12) {
    if (breakpoints.size() < 2) throw std::invalid_argument("tanh_sinh_panels: need >= 2 points");
    double total = 0.0;
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        total += tanh_sinh(f, breakpoints[i - 1], breakpoints[i], rel_tol, max_level);
    return total;
}

}  // namespace fabric
