#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fabric/analytic.hpp"
#include "fabric/core.hpp"
#include "fabric/errors.hpp"

namespace fabric {

enum class TimeScheme { implicit_euler, crank_nicolson, explicit_euler };
enum class BoundaryKind { dirichlet_zero, no_flux };
enum class SpacingScheme { physical_uniform, hat_uniform };

/// How the physical-coordinate transport operator is assembled.
///  conservative   -- finite volumes in the transformed measure; equivalent to
///                    the split form with derived coefficients and conserves
///                    the transported mass to round-off (default).
///  split_derived  -- advection + divergence split with the coefficients that
///                    actually follow from the coordinate pull-back,
///                    A = D(1-beta)/beta^2 r^{1-2beta}, C = D/beta^2 r^{2-2beta}.
///  split_printed  -- the same split with coefficient D on both terms, as
///                    printed in the source being compared against; kept as a
///                    comparison-only assembly (it is inconsistent with the
///                    hatted-coordinate equivalence).
enum class PhysicalForm { conservative, split_derived, split_printed };

struct SolveOptions {
    TimeScheme scheme = TimeScheme::implicit_euler;
    BoundaryKind outer_bc = BoundaryKind::dirichlet_zero;
    double dt = 0.0;  // 0 -> automatic (explicit-limit based)
    long max_steps = 50000000L;
};

struct SolveDiagnostics {
    long steps = 0;
    double dt = 0.0;
    double mass_initial = 0.0;
    double mass_final = 0.0;
    double min_value = 0.0;
    double wall_seconds = 0.0;
};

struct Grid1D {
    double x_min = 0.0;
    double x_max = 1.0;
    int n = 64;
    SpacingScheme scheme = SpacingScheme::physical_uniform;

    Grid1D(double lo, double hi, int cells, SpacingScheme s = SpacingScheme::physical_uniform)
        : x_min(lo), x_max(hi), n(cells), scheme(s) {
        if (!(x_min < x_max)) throw std::invalid_argument("Grid1D: need x_min < x_max");
        if (n < 16) throw std::invalid_argument("Grid1D: need at least 16 cells");
    }

    double dx() const { return (x_max - x_min) / n; }

    std::vector<double> faces() const {
        std::vector<double> f(n + 1);
        for (int i = 0; i <= n; ++i) f[i] = x_min + (x_max - x_min) * i / n;
        return f;
    }

    std::vector<double> cell_centers() const {
        std::vector<double> c(n);
        const double h = dx();
        for (int i = 0; i < n; ++i) c[i] = x_min + (i + 0.5) * h;
        return c;
    }
};

/// Numeric-vs-analytic comparison record.
struct SolveReport {
    double l2_rel_error = 0.0;
    double linf_rel_error = 0.0;
    Grid1D grid{0.0, 1.0, 64};
    long steps = 0;
    double wall_time = 0.0;
};

namespace detail {

inline void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                         std::vector<double>& upper, std::vector<double>& rhs,
                         std::vector<double>& out) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    out[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) out[i] = (rhs[i] - upper[i] * out[i + 1]) / diag[i];
}

/// Cell-centered finite-volume stepper for
///   V_i du_i/dt = G_{i+1}(u_{i+1}-u_i) - G_i(u_i-u_{i-1}) - V_i A_i (du/dr)_i
/// with theta time stepping. G has n+1 entries (boundary conductances encode
/// the boundary condition: 0 for no-flux/symmetry, finite for Dirichlet-zero
/// against a zero ghost value). A (optional) is a per-cell advection speed
/// discretized with centered differences.
class FvStepper {
public:
    FvStepper(std::vector<double> centers, std::vector<double> volumes,
              std::vector<double> conductances, std::vector<double> advection = {})
        : centers_(std::move(centers)),
          volumes_(std::move(volumes)),
          cond_(std::move(conductances)),
          adv_(std::move(advection)) {
        const std::size_t n = centers_.size();
        if (volumes_.size() != n || cond_.size() != n + 1)
            throw std::invalid_argument("FvStepper: inconsistent sizes");
        if (!adv_.empty() && adv_.size() != n)
            throw std::invalid_argument("FvStepper: advection size mismatch");
        for (double v : volumes_)
            if (!(v > 0.0)) throw std::invalid_argument("FvStepper: nonpositive cell volume");
    }

    std::size_t size() const { return centers_.size(); }
    const std::vector<double>& volumes() const { return volumes_; }

    /// Largest explicit-stable step (positivity bound of the FTCS update).
    double explicit_limit() const {
        double dt = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < size(); ++i) {
            const double g = cond_[i] + cond_[i + 1];
            if (g > 0.0) dt = std::min(dt, volumes_[i] / g);
        }
        return dt;
    }

    double mass(const std::vector<double>& u) const {
        double m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) m += u[i] * volumes_[i];
        return m;
    }

    /// Advance n_steps of size dt with the given theta (1 = implicit Euler,
    /// 1/2 = Crank-Nicolson, 0 = explicit).
    void run(std::vector<double>& u, double dt, long n_steps, double theta) const {
        const std::size_t n = size();
        std::vector<double> ml(n), md(n), mu_(n);           // operator tridiagonal
        std::vector<double> al(n), ad(n), au(n), rhs(n), tmp(n);
        for (std::size_t i = 0; i < n; ++i) {
            double lower = cond_[i];
            double diag = -(cond_[i] + cond_[i + 1]);
            double upper = cond_[i + 1];
            if (!adv_.empty() && adv_[i] != 0.0) {
                const std::size_t lo = (i == 0) ? 0 : i - 1;
                const std::size_t hi = (i + 1 == n) ? n - 1 : i + 1;
                const double c = volumes_[i] * adv_[i] / (centers_[hi] - centers_[lo]);
                // contribution of -A_i (du/dr)_i, centered inside, one-sided at ends
                if (i == 0) {
                    diag += c;
                    upper -= c;
                } else if (i + 1 == n) {
                    diag -= c;
                    lower += c;
                } else {
                    lower += c;
                    upper -= c;
                }
            }
            ml[i] = lower;
            md[i] = diag;
            mu_[i] = upper;
        }

        for (long s = 0; s < n_steps; ++s) {
            // rhs = (V/dt) u + (1-theta) M u
            for (std::size_t i = 0; i < n; ++i) {
                double lu = md[i] * u[i];
                if (i > 0) lu += ml[i] * u[i - 1];
                if (i + 1 < n) lu += mu_[i] * u[i + 1];
                rhs[i] = volumes_[i] / dt * u[i] + (1.0 - theta) * lu;
            }
            if (theta == 0.0) {
                for (std::size_t i = 0; i < n; ++i) u[i] = rhs[i] * dt / volumes_[i];
                continue;
            }
            for (std::size_t i = 0; i < n; ++i) {
                al[i] = -theta * ml[i];
                ad[i] = volumes_[i] / dt - theta * md[i];
                au[i] = -theta * mu_[i];
            }
            thomas_solve(al, ad, au, rhs, tmp);
            u.swap(tmp);
        }
    }

private:
    std::vector<double> centers_;
    std::vector<double> volumes_;
    std::vector<double> cond_;
    std::vector<double> adv_;
};

inline double theta_of(TimeScheme s) {
    switch (s) {
        case TimeScheme::implicit_euler: return 1.0;
        case TimeScheme::crank_nicolson: return 0.5;
        case TimeScheme::explicit_euler: return 0.0;
    }
    return 1.0;
}

inline void check_uniform_nodes(const std::vector<double>& nodes) {
    const double h = nodes[1] - nodes[0];
    for (std::size_t i = 2; i < nodes.size(); ++i)
        if (std::fabs((nodes[i] - nodes[i - 1]) - h) > 1e-9 * std::fabs(h))
            throw std::invalid_argument("solver: nodes must be uniformly spaced cell centers");
}

struct StepPlan {
    double dt;
    long steps;
};

inline StepPlan plan_steps(double t_final, double dt_request, double dt_auto, long max_steps,
                           long min_steps = 1) {
    double dt = (dt_request > 0.0) ? dt_request : dt_auto;
    long steps = static_cast<long>(std::ceil(t_final / dt - 1e-12));
    if (steps < min_steps) steps = min_steps;
    if (steps > max_steps)
        throw ConfigError("solver: step budget exceeded; enlarge dt or max_steps");
    return {t_final / static_cast<double>(steps), steps};
}

/// Default step size: stability-limited for the explicit scheme, accuracy-based
/// (a fixed step budget) for the unconditionally stable implicit schemes.
inline double default_dt(TimeScheme scheme, double explicit_limit, double t_final) {
    if (scheme == TimeScheme::explicit_euler) return 0.9 * explicit_limit;
    return t_final / 4096.0;
}

inline SampledField<double> timed_run(const SampledField<double>& init, const FvStepper& stepper,
                                      const StepPlan& plan, double theta,
                                      SolveDiagnostics* diag) {
    if (theta == 0.0) {
        const double limit = stepper.explicit_limit();
        if (plan.dt > limit * (1.0 + 1e-12))
            throw ConfigError("solver: explicit scheme unstable at this step size (limit " +
                              std::to_string(limit) + ")");
    }
    std::vector<double> u = init.values();
    const auto t0 = std::chrono::steady_clock::now();
    const double mass0 = stepper.mass(u);
    stepper.run(u, plan.dt, plan.steps, theta);
    const auto t1 = std::chrono::steady_clock::now();
    if (diag) {
        diag->steps = plan.steps;
        diag->dt = plan.dt;
        diag->mass_initial = mass0;
        diag->mass_final = stepper.mass(u);
        diag->min_value = *std::min_element(u.begin(), u.end());
        diag->wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    }
    return SampledField<double>(init.nodes(), std::move(u));
}

}  // namespace detail

/// Classical heat equation du/dt_hat = D d^2u/dx_hat^2 on a uniform
/// cell-centered grid in the hatted coordinate. Implicit Euler by default;
/// Crank-Nicolson and explicit (with a pre-step stability check) behind the
/// scheme option. Under no-flux boundaries the discrete mass sum(u) dx_hat is
/// conserved to round-off.
inline SampledField<double> solve_hat_diffusion(const SampledField<double>& init, double D,
                                                double t_hat_final,
                                                const SolveOptions& opts = {},
                                                SolveDiagnostics* diag = nullptr) {
    if (!(D > 0.0)) throw std::invalid_argument("solve_hat_diffusion: D must be > 0");
    if (!(t_hat_final > 0.0))
        throw std::invalid_argument("solve_hat_diffusion: final time must be > 0");
    detail::check_uniform_nodes(init.nodes());
    const std::size_t n = init.size();
    const double dx = init.node(1) - init.node(0);

    std::vector<double> volumes(n, dx);
    std::vector<double> cond(n + 1, D / dx);
    const double bc = (opts.outer_bc == BoundaryKind::dirichlet_zero) ? 2.0 * D / dx : 0.0;
    cond[0] = bc;
    cond[n] = bc;

    detail::FvStepper stepper(init.nodes(), std::move(volumes), std::move(cond));
    const double dt_auto = detail::default_dt(opts.scheme, stepper.explicit_limit(), t_hat_final);
    const auto plan = detail::plan_steps(t_hat_final, opts.dt, dt_auto, opts.max_steps);
    return detail::timed_run(init, stepper, plan, detail::theta_of(opts.scheme), diag);
}

/// Transport-diffusion equation in the physical radial coordinate,
/// d u / d t^alpha = (pull-back of D d^2/dx_hat^2), solved on the half line
/// with a symmetry (zero-flux) face at r = 0. The solver clock is the hatted
/// time t_hat = t^alpha; callers pass physical t_final. Face coefficients are
/// evaluated at cell faces only, so the r = 0 singularity of the split-form
/// coefficients is never touched.
inline SampledField<double> solve_physical_transport(const SampledField<double>& init,
                                                     FractalIndices idx, double D,
                                                     double t_final,
                                                     const SolveOptions& opts = {},
                                                     PhysicalForm form = PhysicalForm::conservative,
                                                     SolveDiagnostics* diag = nullptr) {
    if (!(D > 0.0)) throw std::invalid_argument("solve_physical_transport: D must be > 0");
    if (!(t_final > 0.0))
        throw std::invalid_argument("solve_physical_transport: final time must be > 0");
    const std::size_t n = init.size();
    if (!(init.node(0) > 0.0))
        throw std::invalid_argument(
            "solve_physical_transport: cell centers must be strictly positive (r = 0 is a face)");

    // reconstruct faces from centers; the innermost face is pinned to r = 0
    std::vector<double> faces(n + 1);
    faces[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) faces[i] = 0.5 * (init.node(i - 1) + init.node(i));
    faces[n] = init.node(n - 1) + (init.node(n - 1) - faces[n - 1]);

    const double beta = idx.beta();
    const double t_hat_final = hat_time(t_final, idx.alpha());

    std::vector<double> volumes(n), cond(n + 1, 0.0), adv;
    if (form == PhysicalForm::conservative) {
        // d w/d t_hat = (1/J) d/dr [ (D/J) dw/dr ], J = beta r^{beta-1};
        // cell measure is the hatted length, face coefficient D r^{1-beta}/beta
        for (std::size_t i = 0; i < n; ++i)
            volumes[i] = hat_space(faces[i + 1], beta) - hat_space(faces[i], beta);
        for (std::size_t f = 1; f < n; ++f) {
            const double a =
                D * ((beta == 1.0) ? 1.0 : std::pow(faces[f], 1.0 - beta)) / beta;
            cond[f] = a / (init.node(f) - init.node(f - 1));
        }
    } else {
        // split transport+diffusion assembly -A(r) dw/dr + d/dr(C(r) dw/dr)
        const double adv_coef = (form == PhysicalForm::split_derived)
                                    ? D * (1.0 - beta) / (beta * beta)
                                    : D;
        const double dif_coef = (form == PhysicalForm::split_derived) ? D / (beta * beta) : D;
        for (std::size_t i = 0; i < n; ++i) volumes[i] = faces[i + 1] - faces[i];
        for (std::size_t f = 1; f < n; ++f) {
            const double c = dif_coef * std::pow(faces[f], 2.0 - 2.0 * beta);
            cond[f] = c / (init.node(f) - init.node(f - 1));
        }
        adv.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = init.node(i);
            adv[i] = adv_coef * std::pow(r, 1.0 - 2.0 * beta);
            const double c_here = dif_coef * std::pow(r, 2.0 - 2.0 * beta);
            const double dr = faces[i + 1] - faces[i];
            const double peclet = std::fabs(adv[i]) * dr / c_here;
            if (peclet > 2.0 + 1e-9)
                throw ConfigError(
                    "solve_physical_transport: cell Peclet number exceeds 2 near the "
                    "coordinate singularity; refine the grid near r = 0");
        }
    }
    if (opts.outer_bc == BoundaryKind::dirichlet_zero) {
        const double r_out = faces[n];
        const double gap = r_out - init.node(n - 1);
        double a_out;
        if (form == PhysicalForm::conservative)
            a_out = D * ((beta == 1.0) ? 1.0 : std::pow(r_out, 1.0 - beta)) / beta;
        else
            a_out = ((form == PhysicalForm::split_derived) ? D / (beta * beta) : D) *
                    std::pow(r_out, 2.0 - 2.0 * beta);
        cond[n] = a_out / gap;
    }
    // cond[0] stays 0: symmetry face at r = 0

    detail::FvStepper stepper(init.nodes(), std::move(volumes), std::move(cond), std::move(adv));
    const double dt_auto = detail::default_dt(opts.scheme, stepper.explicit_limit(), t_hat_final);
    const auto plan = detail::plan_steps(t_hat_final, opts.dt, dt_auto, opts.max_steps);
    return detail::timed_run(init, stepper, plan, detail::theta_of(opts.scheme), diag);
}

/// Scale-dependent-diffusivity comparison model (radial, d >= 1):
///   dP/dt = r^{1-d} d/dr ( k0 r^{d+1-2 beta} dP/dr ),
/// conservative finite volumes with cell measure r^{d-1} dr and a symmetry
/// face at r = 0. d = 1 gives the one-dimensional symmetric form.
inline SampledField<double> solve_richardson(const SampledField<double>& init, double k0,
                                             double beta, int dim, double t_final,
                                             const SolveOptions& opts = {},
                                             SolveDiagnostics* diag = nullptr) {
    if (!(k0 > 0.0)) throw std::invalid_argument("solve_richardson: k0 must be > 0");
    if (!(beta > 0.0) || beta > 1.0)
        throw std::invalid_argument("solve_richardson: beta must lie in (0,1]");
    if (dim < 1) throw std::invalid_argument("solve_richardson: dimension must be >= 1");
    if (!(t_final > 0.0)) throw std::invalid_argument("solve_richardson: final time must be > 0");
    const std::size_t n = init.size();
    if (!(init.node(0) > 0.0))
        throw std::invalid_argument("solve_richardson: cell centers must be strictly positive");

    std::vector<double> faces(n + 1);
    faces[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) faces[i] = 0.5 * (init.node(i - 1) + init.node(i));
    faces[n] = init.node(n - 1) + (init.node(n - 1) - faces[n - 1]);

    auto rpow = [](double r, double p) { return (p == 0.0) ? 1.0 : ((p == 1.0) ? r : std::pow(r, p)); };

    std::vector<double> volumes(n), cond(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        volumes[i] = (rpow(faces[i + 1], dim) - rpow(faces[i], dim)) / dim;
    const double face_power = dim + 1.0 - 2.0 * beta;
    for (std::size_t f = 1; f < n; ++f)
        cond[f] = k0 * rpow(faces[f], face_power) / (init.node(f) - init.node(f - 1));
    if (opts.outer_bc == BoundaryKind::dirichlet_zero)
        cond[n] = k0 * rpow(faces[n], face_power) / (faces[n] - init.node(n - 1));

    detail::FvStepper stepper(init.nodes(), std::move(volumes), std::move(cond));
    const double dt_auto = detail::default_dt(opts.scheme, stepper.explicit_limit(), t_final);
    const auto plan = detail::plan_steps(t_final, opts.dt, dt_auto, opts.max_steps);
    return detail::timed_run(init, stepper, plan, detail::theta_of(opts.scheme), diag);
}

/// Gaussian pulse of width sigma (used as the discrete delta: three cells
/// wide by default at the call sites), normalized to unit discrete mass with
/// the given cell volume weights.
inline SampledField<double> gaussian_pulse(const std::vector<double>& centers, double center,
                                           double sigma, double cell_measure) {
    std::vector<double> u(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double d = (centers[i] - center) / sigma;
        u[i] = std::exp(-0.5 * d * d);
    }
    double mass = 0.0;
    for (double v : u) mass += v * cell_measure;
    for (double& v : u) v /= mass;
    return SampledField<double>(centers, std::move(u));
}

/// Solves the hatted heat equation from a discrete delta, maps the solution
/// back to physical coordinates with the Jacobian beta |x|^{beta-1}, and
/// compares against the analytic stretched Gaussian.
inline SolveReport greens_function_check(FractalIndices idx, double D, double t,
                                         const Grid1D& hat_grid,
                                         const SolveOptions& opts = {}) {
    if (!(t > 0.0)) throw std::domain_error("greens_function_check: time must be > 0");
    const auto t0 = std::chrono::steady_clock::now();

    const auto centers = hat_grid.cell_centers();
    const double dx = hat_grid.dx();
    const double sigma0 = 3.0 * dx;  // narrow pulse, not a single-node spike
    auto init = gaussian_pulse(centers, 0.0, sigma0, dx);

    const double t_hat = hat_time(t, idx.alpha());
    SolveOptions run = opts;
    if (run.dt <= 0.0) run.dt = std::min(dx * dx / (2.0 * D), t_hat / 10.0);
    SolveDiagnostics diag;
    auto u_hat = solve_hat_diffusion(init, D, t_hat, run, &diag);

    StretchedGaussian packet(idx, D, 1);
    double num2 = 0.0, den2 = 0.0, ninf = 0.0, dinf = 0.0;
    for (std::size_t i = 0; i < u_hat.size(); ++i) {
        const double xh = u_hat.node(i);
        const double x = unhat_space(xh, idx.beta());
        const double jac =
            (idx.beta() == 1.0) ? 1.0
                                : idx.beta() * std::pow(std::fabs(x), idx.beta() - 1.0);
        const double p_num = u_hat.value(i) * jac;
        const double p_ana = pdf_line(packet, x, t);
        num2 += (p_num - p_ana) * (p_num - p_ana);
        den2 += p_ana * p_ana;
        ninf = std::max(ninf, std::fabs(p_num - p_ana));
        dinf = std::max(dinf, std::fabs(p_ana));
    }
    const auto t1 = std::chrono::steady_clock::now();

    SolveReport report;
    report.l2_rel_error = std::sqrt(num2 / den2);
    report.linf_rel_error = ninf / dinf;
    report.grid = hat_grid;
    report.steps = diag.steps;
    report.wall_time = std::chrono::duration<double>(t1 - t0).count();
    return report;
}

}  // namespace fabric
