#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fabric/errors.hpp"

namespace fabric {

/// Scaling exponents of the metric fabric S^{alpha,beta}: alpha rescales time
/// intervals, beta rescales displacements. Both live in (0,1]; (1,1) is the
/// ordinary metric and every operation built on it reduces to its classical
/// counterpart exactly.
class FractalIndices {
public:
    FractalIndices(double alpha, double beta) : alpha_(alpha), beta_(beta) {
        if (!(alpha > 0.0) || alpha > 1.0)
            throw std::invalid_argument("FractalIndices: alpha must lie in (0,1]");
        if (!(beta > 0.0) || beta > 1.0)
            throw std::invalid_argument("FractalIndices: beta must lie in (0,1]");
    }

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }

    /// True for the ordinary (non-fractal) metric alpha = beta = 1.
    bool identity() const noexcept { return alpha_ == 1.0 && beta_ == 1.0; }

    /// Scaling exponent of the mean square displacement, eta = alpha/beta.
    double msd_exponent() const noexcept { return alpha_ / beta_; }

private:
    double alpha_;
    double beta_;
};

// The power maps below short-circuit the exponent-one case so that the
// identity fabric is exact to the last bit, not merely up to pow() rounding.

inline double hat_time(double dt, double alpha) {
    if (dt < 0.0) throw std::domain_error("hat_time: time interval must be >= 0");
    if (alpha == 1.0) return dt;
    return std::pow(dt, alpha);
}

inline double unhat_time(double dt_hat, double alpha) {
    if (dt_hat < 0.0) throw std::domain_error("unhat_time: time interval must be >= 0");
    if (alpha == 1.0) return dt_hat;
    return std::pow(dt_hat, 1.0 / alpha);
}

/// Signed power map x -> sign(x)|x|^beta. This is the single place negative
/// displacements are given a meaning; it makes the transform an odd bijection
/// of the line and keeps symmetric densities symmetric.
inline double hat_space(double dx, double beta) {
    if (beta == 1.0) return dx;
    if (dx == 0.0) return dx;
    return std::copysign(std::pow(std::fabs(dx), beta), dx);
}

inline double unhat_space(double dx_hat, double beta) {
    if (beta == 1.0) return dx_hat;
    if (dx_hat == 0.0) return dx_hat;
    return std::copysign(std::pow(std::fabs(dx_hat), 1.0 / beta), dx_hat);
}

struct HatDisplacement {
    double dx_hat;
    double dt_hat;
};

struct Displacement {
    double dx;
    double dt;
};

/// (dx, dt) -> (sign(dx)|dx|^beta, dt^alpha).
inline HatDisplacement to_hat(double dx, double dt, const FractalIndices& idx) {
    return {hat_space(dx, idx.beta()), hat_time(dt, idx.alpha())};
}

/// Exact inverse of to_hat.
inline Displacement from_hat(double dx_hat, double dt_hat, const FractalIndices& idx) {
    return {unhat_space(dx_hat, idx.beta()), unhat_time(dt_hat, idx.alpha())};
}

/// A function sampled on a strictly increasing 1-D grid. Values may be real or
/// complex; the field is immutable after construction.
template <class T = double>
class SampledField {
public:
    SampledField(std::vector<double> nodes, std::vector<T> values)
        : nodes_(std::move(nodes)), values_(std::move(values)) {
        if (nodes_.size() < 2)
            throw std::invalid_argument("SampledField: need at least 2 nodes");
        if (nodes_.size() != values_.size())
            throw std::invalid_argument("SampledField: nodes/values length mismatch");
        for (std::size_t i = 1; i < nodes_.size(); ++i)
            if (!(nodes_[i] > nodes_[i - 1]))
                throw std::invalid_argument("SampledField: nodes must be strictly increasing");
    }

    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<T>& values() const noexcept { return values_; }
    double node(std::size_t i) const { return nodes_.at(i); }
    const T& value(std::size_t i) const { return values_.at(i); }

private:
    std::vector<double> nodes_;
    std::vector<T> values_;
};

namespace detail {

/// Derivative at `at` of the quadratic through (x[j], f[j]), j = 0..2.
/// Newton divided-difference form: exact for constant and linear samples.
template <class T>
T lagrange3_derivative(const double x[3], const T f[3], double at) {
    const T d01 = (f[1] - f[0]) / (x[1] - x[0]);
    const T d12 = (f[2] - f[1]) / (x[2] - x[1]);
    const T d012 = (d12 - d01) / (x[2] - x[0]);
    return d01 + d012 * (2.0 * at - x[0] - x[1]);
}

inline void check_hat_gap(double a, double b) {
    const double tol =
        1e3 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(a), std::fabs(b));
    if (std::fabs(a - b) <= tol)
        throw IllConditionedError(
            "hausdorff_derivative: transformed node spacing below machine tolerance");
}

/// First index of the 3-point stencil around `at` (one-sided at boundaries).
inline std::size_t stencil_start(std::size_t n, std::size_t at) {
    if (at == 0) return 0;
    if (at + 1 >= n) return n - 3;
    return at - 1;
}

}  // namespace detail

/// Derivative of g with respect to the fractal measure t^alpha at node `at`,
/// i.e. the ordinary derivative in the transformed variable t_hat = t^alpha.
/// Second-order differencing in t_hat (centered inside, one-sided at the
/// boundary); with only two nodes the defining limit quotient
/// [g(t)-g(t')]/[t^alpha-t'^alpha] is used directly.
template <class T>
T hausdorff_derivative(const SampledField<T>& g, double alpha, std::size_t at) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::domain_error("hausdorff_derivative: alpha must lie in (0,1]");
    if (at >= g.size()) throw std::out_of_range("hausdorff_derivative: node index out of range");
    if (g.node(0) < 0.0)
        throw std::domain_error("hausdorff_derivative: fractal measure requires nodes >= 0");

    if (g.size() == 2) {
        const double h0 = hat_time(g.node(0), alpha);
        const double h1 = hat_time(g.node(1), alpha);
        detail::check_hat_gap(h0, h1);
        return (g.value(1) - g.value(0)) / (h1 - h0);
    }

    const std::size_t i0 = detail::stencil_start(g.size(), at);
    double th[3];
    T f[3];
    for (int j = 0; j < 3; ++j) {
        th[j] = hat_time(g.node(i0 + j), alpha);
        f[j] = g.value(i0 + j);
    }
    detail::check_hat_gap(th[0], th[1]);
    detail::check_hat_gap(th[1], th[2]);
    detail::check_hat_gap(th[0], th[2]);
    return detail::lagrange3_derivative(th, f, hat_time(g.node(at), alpha));
}

/// Velocity in the fabric S^{alpha,beta}: d(x_hat)/d(t_hat) along a sampled
/// trajectory x(t), with x_hat the signed power map of the positions. Uses the
/// same stencils as hausdorff_derivative, applied to the transformed samples.
inline double fractal_velocity(const SampledField<double>& x_of_t, const FractalIndices& idx,
                               std::size_t at) {
    if (at >= x_of_t.size())
        throw std::out_of_range("fractal_velocity: node index out of range");
    if (x_of_t.node(0) < 0.0)
        throw std::domain_error("fractal_velocity: fractal measure requires nodes >= 0");

    if (x_of_t.size() == 2) {
        const double h0 = hat_time(x_of_t.node(0), idx.alpha());
        const double h1 = hat_time(x_of_t.node(1), idx.alpha());
        detail::check_hat_gap(h0, h1);
        return (hat_space(x_of_t.value(1), idx.beta()) - hat_space(x_of_t.value(0), idx.beta())) /
               (h1 - h0);
    }

    const std::size_t i0 = detail::stencil_start(x_of_t.size(), at);
    double th[3];
    double xh[3];
    for (int j = 0; j < 3; ++j) {
        th[j] = hat_time(x_of_t.node(i0 + j), idx.alpha());
        xh[j] = hat_space(x_of_t.value(i0 + j), idx.beta());
    }
    detail::check_hat_gap(th[0], th[1]);
    detail::check_hat_gap(th[1], th[2]);
    detail::check_hat_gap(th[0], th[2]);
    return detail::lagrange3_derivative(th, xh, hat_time(x_of_t.node(at), idx.alpha()));
}

/// Linear interpolation on a sorted node set; clamps outside the range.
inline double interp_linear(const std::vector<double>& nodes, const std::vector<double>& values,
                            double x) {
    if (nodes.size() != values.size() || nodes.size() < 2)
        throw std::invalid_argument("interp_linear: bad table");
    if (x <= nodes.front()) return values.front();
    if (x >= nodes.back()) return values.back();
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - nodes.begin());
    const double w = (x - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
    return values[i - 1] + w * (values[i] - values[i - 1]);
}

}  // namespace fabric
