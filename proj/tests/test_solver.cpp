#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fabric/solver.hpp"

using namespace fabric;

namespace {

// half-line cell centers with a face at r = 0
std::vector<double> half_line_centers(double R, int n) {
    std::vector<double> c(n);
    const double h = R / n;
    for (int i = 0; i < n; ++i) c[i] = (i + 0.5) * h;
    return c;
}

double l2_rel(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("zero initial condition stays zero", "[solver]") {
    Grid1D grid(-4.0, 4.0, 64);
    SampledField<double> zero(grid.cell_centers(), std::vector<double>(64, 0.0));
    auto out = solve_hat_diffusion(zero, 1.0, 0.5);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.value(i) == 0.0);
}

TEST_CASE("hat diffusion converges to the heat kernel from a narrow pulse", "[solver]") {
    Grid1D grid(-12.0, 12.0, 2048);
    const double dx = grid.dx();
    const double D = 1.0, t_hat = 1.0;
    auto init = gaussian_pulse(grid.cell_centers(), 0.0, 3.0 * dx, dx);
    SolveOptions opts;
    opts.dt = dx * dx / (2.0 * D);
    auto u = solve_hat_diffusion(init, D, t_hat, opts);
    // analytic heat kernel oracle (the sigma0 offset is part of the error budget)
    std::vector<double> kernel(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double x = u.node(i);
        kernel[i] = std::exp(-x * x / (4.0 * D * t_hat)) / std::sqrt(4.0 * M_PI * D * t_hat);
    }
    std::vector<double> num(u.values().begin(), u.values().end());
    CHECK(l2_rel(num, kernel) <= 1e-3);
}

TEST_CASE("hat diffusion conserves mass under no-flux boundaries", "[solver]") {
    Grid1D grid(-8.0, 8.0, 512);
    const double dx = grid.dx();
    auto init = gaussian_pulse(grid.cell_centers(), 1.0, 0.4, dx);
    SolveOptions opts;
    opts.outer_bc = BoundaryKind::no_flux;
    SolveDiagnostics diag;
    auto u = solve_hat_diffusion(init, 0.7, 2.0, opts, &diag);
    CHECK(diag.mass_final == Catch::Approx(diag.mass_initial).epsilon(1e-10));
    CHECK(diag.min_value >= 0.0);  // implicit scheme preserves nonnegativity
}

TEST_CASE("hat diffusion translation invariance", "[solver]") {
    Grid1D grid(-16.0, 16.0, 1024);
    const double dx = grid.dx();
    const double shift = 64 * dx;  // integer number of cells
    auto a = solve_hat_diffusion(gaussian_pulse(grid.cell_centers(), 0.0, 0.5, dx), 1.0, 1.0);
    auto b =
        solve_hat_diffusion(gaussian_pulse(grid.cell_centers(), shift, 0.5, dx), 1.0, 1.0);
    // compare b shifted back by 64 cells; boundary influence is ~1e-50 here
    double worst = 0.0;
    for (std::size_t i = 0; i + 64 < a.size(); ++i)
        worst = std::max(worst, std::fabs(a.value(i) - b.value(i + 64)));
    CHECK(worst < 1e-12);
}

TEST_CASE("explicit scheme rejects unstable steps before stepping", "[solver]") {
    Grid1D grid(-4.0, 4.0, 256);
    auto init = gaussian_pulse(grid.cell_centers(), 0.0, 0.2, grid.dx());
    SolveOptions opts;
    opts.scheme = TimeScheme::explicit_euler;
    opts.dt = 10.0 * grid.dx() * grid.dx();  // far beyond the stability limit
    CHECK_THROWS_AS(solve_hat_diffusion(init, 1.0, 1.0, opts), ConfigError);
    // a stable explicit run works and stays close to implicit
    SolveOptions ok;
    ok.scheme = TimeScheme::explicit_euler;
    auto ue = solve_hat_diffusion(init, 1.0, 0.25, ok);
    auto ui = solve_hat_diffusion(init, 1.0, 0.25);
    std::vector<double> ve(ue.values().begin(), ue.values().end());
    std::vector<double> vi(ui.values().begin(), ui.values().end());
    CHECK(l2_rel(ve, vi) < 2e-3);
}

TEST_CASE("identity fabric: physical transport matches hat diffusion bitwise", "[solver]") {
    // same half-line grid, same boundary handling, beta = 1: the two solvers
    // assemble identical systems and must produce identical bits
    const int n = 256;
    auto centers = half_line_centers(10.0, n);
    const double h = 10.0 / n;
    auto init = gaussian_pulse(centers, 3.0, 0.5, h);
    SolveOptions opts;
    opts.outer_bc = BoundaryKind::dirichlet_zero;
    // hat solver with a symmetry (no-flux) left boundary == half-line setup:
    // emulate by reflecting? instead compare against richardson at beta=1,
    // whose assembly reduces to the same classical operator
    auto phys = solve_physical_transport(init, FractalIndices(1.0, 1.0), 0.8, 1.5, opts);
    auto rich = solve_richardson(init, 0.8, 1.0, 1, 1.5, opts);
    for (std::size_t i = 0; i < phys.size(); ++i) CHECK(phys.value(i) == rich.value(i));
}

TEST_CASE("physical transport equals the mapped hat solution at (1, 2/3)", "[solver]") {
    // oracle: solve in hatted coordinates, pull the scalar field back
    const FractalIndices idx(1.0, 2.0 / 3.0);
    const double D = 1.0, t_final = 1.0;
    const int n = 4096;
    const double R = 18.0;
    auto centers = half_line_centers(R, n);
    const double h = R / n;

    // even initial data, expressed in physical coordinates
    auto w0 = [](double r) { return std::exp(-r * r / 0.5); };
    std::vector<double> init_vals(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) init_vals[i] = w0(centers[i]);
    SampledField<double> init(centers, init_vals);

    SolveOptions opts;
    auto w = solve_physical_transport(init, idx, D, t_final, opts);

    // hat-side oracle on its own (finer) uniform grid in x_hat
    const double R_hat = hat_space(R, idx.beta());
    const int n_hat = 8192;
    std::vector<double> hat_centers(n_hat);
    const double hh = R_hat / n_hat;
    for (int i = 0; i < n_hat; ++i) hat_centers[i] = (i + 0.5) * hh;
    std::vector<double> hat_vals(n_hat);
    for (int i = 0; i < n_hat; ++i)
        hat_vals[i] = w0(unhat_space(hat_centers[i], idx.beta()));
    SampledField<double> hat_init(hat_centers, hat_vals);
    SolveOptions hat_opts;
    hat_opts.outer_bc = BoundaryKind::dirichlet_zero;
    // half line with symmetry at 0: conductance 0 on the left comes from
    // solve_physical_transport internals; for the hat solver emulate the even
    // problem with a no-flux left boundary via reflection: no_flux applies to
    // both ends, so pin the far end with a large domain instead
    hat_opts.outer_bc = BoundaryKind::no_flux;
    auto u_hat = solve_hat_diffusion(hat_init, D, hat_time(t_final, idx.alpha()), hat_opts);

    // compare w(r) against u_hat(r^beta), scalar pull-back, skipping the
    // outermost decade where both fields are ~0
    std::vector<double> a, b;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double r = w.node(i);
        if (r > 0.8 * R) continue;
        a.push_back(w.value(i));
        b.push_back(interp_linear(u_hat.nodes(), u_hat.values(), hat_space(r, idx.beta())));
    }
    CHECK(l2_rel(a, b) <= 5e-3);
}

TEST_CASE("physical transport conserves the transported mass", "[solver]") {
    const FractalIndices idx(0.8, 0.5);
    const int n = 512;
    auto centers = half_line_centers(12.0, n);
    std::vector<double> vals(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i)
        vals[i] = std::exp(-(centers[i] - 2.0) * (centers[i] - 2.0));
    SampledField<double> init(centers, vals);
    SolveOptions opts;
    opts.outer_bc = BoundaryKind::no_flux;
    SolveDiagnostics diag;
    auto out = solve_physical_transport(init, idx, 1.0, 2.0, opts, PhysicalForm::conservative,
                                        &diag);
    CHECK(diag.mass_final == Catch::Approx(diag.mass_initial).epsilon(1e-10));
    CHECK(diag.min_value >= 0.0);
}

TEST_CASE("split assembly with derived coefficients matches the conservative form",
          "[solver]") {
    const FractalIndices idx(1.0, 2.0 / 3.0);
    const int n = 2048;
    auto centers = half_line_centers(14.0, n);
    std::vector<double> vals(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i)
        vals[i] = std::exp(-centers[i] * centers[i] / 0.5);
    SampledField<double> init(centers, vals);

    auto cons = solve_physical_transport(init, idx, 1.0, 1.0, {}, PhysicalForm::conservative);
    auto split = solve_physical_transport(init, idx, 1.0, 1.0, {}, PhysicalForm::split_derived);
    std::vector<double> a(cons.values().begin(), cons.values().end());
    std::vector<double> b(split.values().begin(), split.values().end());
    CHECK(l2_rel(a, b) < 5e-3);

    // the printed coefficients produce a visibly different operator
    auto printed = solve_physical_transport(init, idx, 1.0, 1.0, {}, PhysicalForm::split_printed);
    std::vector<double> c(printed.values().begin(), printed.values().end());
    CHECK(l2_rel(c, a) > 20.0 * l2_rel(b, a));
}

TEST_CASE("richardson solver reduces to classical diffusion at beta = 1", "[solver]") {
    const int n = 512;
    auto centers = half_line_centers(12.0, n);
    const double h = 12.0 / n;
    auto init = gaussian_pulse(centers, 4.0, 0.5, h);
    auto r1 = solve_richardson(init, 1.0, 1.0, 1, 1.0);
    // against the half-line heat solution computed by the physical solver
    auto heat = solve_physical_transport(init, FractalIndices(1.0, 1.0), 1.0, 1.0);
    for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1.value(i) == heat.value(i));
}

TEST_CASE("richardson profile approaches the renormalized stretched form", "[solver]") {
    // beta = 2/3, d = 3: long-time profile vs the analytic shape after
    // amplitude matching (L2 of shapes)
    const double beta = 2.0 / 3.0, k0 = 1.0;
    const int d = 3;
    const int n = 2048;
    const double R = 60.0;
    auto centers = half_line_centers(R, n);
    const double h = R / n;
    // narrow radial pulse at the origin with unit radial mass
    std::vector<double> vals(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double r = centers[i];
        vals[i] = std::exp(-0.5 * (r / (3.0 * h)) * (r / (3.0 * h)));
    }
    double mass = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double rl = i * h, rr = (i + 1) * h;
        mass += vals[i] * (std::pow(rr, d) - std::pow(rl, d)) / d;
    }
    for (double& v : vals) v /= mass;
    SampledField<double> init(centers, vals);

    const double t_final = 4.0;
    auto u = solve_richardson(init, k0, beta, d, t_final);

    RichardsonPdf rp(k0, beta, d);
    std::vector<double> num, ana;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.node(i) > 0.7 * R) continue;
        num.push_back(u.value(i));
        ana.push_back(rp.normalized(u.node(i), t_final));
    }
    // amplitude matching: scale numeric to minimize L2 against analytic
    double dot = 0.0, nn = 0.0;
    for (std::size_t i = 0; i < num.size(); ++i) {
        dot += num[i] * ana[i];
        nn += num[i] * num[i];
    }
    const double scale = dot / nn;
    for (double& v : num) v *= scale;
    CHECK(l2_rel(num, ana) <= 1e-2);
    // numeric carries unit mass against r^{d-1} dr, the analytic against
    // S_d r^{d-1} dr, so the fitted amplitude must be 1/S_d
    CHECK(scale * surface_area(d) == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("richardson and present model genuinely differ at beta = 2/3", "[solver]") {
    // identical initial data, same grid: the A5 and (corrected) A6 dynamics
    // disagree by far more than the discretization error
    const double beta = 2.0 / 3.0;
    const int n = 1024;
    const double R = 16.0;
    auto centers = half_line_centers(R, n);
    std::vector<double> vals(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i)
        vals[i] = std::exp(-centers[i] * centers[i]);
    SampledField<double> init(centers, vals);

    const double t = 1.0;
    auto rich = solve_richardson(init, 1.0, beta, 1, t);
    auto pres = solve_physical_transport(init, FractalIndices(1.0, beta), 1.0, t);
    std::vector<double> a(rich.values().begin(), rich.values().end());
    std::vector<double> b(pres.values().begin(), pres.values().end());
    const double model_gap = l2_rel(a, b);

    // discretization error proxy: same Richardson run at half resolution
    auto centers2 = half_line_centers(R, n / 2);
    std::vector<double> vals2(centers2.size());
    for (std::size_t i = 0; i < centers2.size(); ++i)
        vals2[i] = std::exp(-centers2[i] * centers2[i]);
    auto rich2 = solve_richardson(SampledField<double>(centers2, vals2), 1.0, beta, 1, t);
    std::vector<double> coarse(rich.size());
    for (std::size_t i = 0; i < rich.size(); ++i)
        coarse[i] = interp_linear(rich2.nodes(), rich2.values(), rich.node(i));
    const double disc_err = l2_rel(coarse, a);

    INFO("model gap " << model_gap << " vs discretization " << disc_err);
    CHECK(model_gap > 10.0 * disc_err);
}

TEST_CASE("greens_function_check meets the acceptance tolerances", "[solver]") {
    SolveReport classical =
        greens_function_check(FractalIndices(1.0, 1.0), 1.0, 1.0, Grid1D(-12.0, 12.0, 2048));
    CHECK(classical.l2_rel_error <= 1e-3);

    SolveReport richardson_fabric =
        greens_function_check(FractalIndices(1.0, 2.0 / 3.0), 1.0, 1.0, Grid1D(-12.0, 12.0, 4096));
    CHECK(richardson_fabric.l2_rel_error <= 5e-3);

    SolveReport subdiffusive =
        greens_function_check(FractalIndices(0.5, 1.0), 1.0, 1.0, Grid1D(-12.0, 12.0, 4096));
    CHECK(subdiffusive.l2_rel_error <= 5e-3);
}

TEST_CASE("greens_function_check converges at order >= 1.8", "[solver]") {
    const FractalIndices idx(1.0, 2.0 / 3.0);
    std::vector<double> errs;
    for (int n : {512, 1024, 2048}) {
        errs.push_back(
            greens_function_check(idx, 1.0, 1.0, Grid1D(-12.0, 12.0, n)).l2_rel_error);
    }
    for (std::size_t i = 1; i < errs.size(); ++i) {
        const double order = std::log2(errs[i - 1] / errs[i]);
        INFO("refinement " << i << " order " << order);
        CHECK(order >= 1.8);
        CHECK(errs[i] < errs[i - 1]);  // monotone decrease
    }
}

TEST_CASE("numeric green's function is self-similar under the fabric rescaling", "[solver]") {
    // P(x, 4t) = P(x / s, t) / s with s = 4^{alpha/(2 beta)}
    const FractalIndices idx(1.0, 2.0 / 3.0);
    const double D = 1.0;
    Grid1D grid(-24.0, 24.0, 4096);
    const double dx = grid.dx();
    auto init = gaussian_pulse(grid.cell_centers(), 0.0, 3.0 * dx, dx);
    auto u1 = solve_hat_diffusion(init, D, hat_time(1.0, idx.alpha()));
    auto u4 = solve_hat_diffusion(init, D, hat_time(4.0, idx.alpha()));

    const double s = std::pow(4.0, idx.alpha() / (2.0 * idx.beta()));
    std::vector<double> lhs, rhs;
    for (std::size_t i = 0; i < u4.size(); ++i) {
        const double xh = u4.node(i);
        const double x = unhat_space(xh, idx.beta());
        if (std::fabs(x) < 1e-3 || std::fabs(x) > 10.0) continue;
        const double jac = idx.beta() * std::pow(std::fabs(x), idx.beta() - 1.0);
        lhs.push_back(u4.value(i) * jac);
        const double x_res = x / s;
        const double xh_res = hat_space(x_res, idx.beta());
        const double jac_res = idx.beta() * std::pow(std::fabs(x_res), idx.beta() - 1.0);
        rhs.push_back(interp_linear(u1.nodes(), u1.values(), xh_res) * jac_res / s);
    }
    CHECK(l2_rel(lhs, rhs) <= 1e-2);
}

TEST_CASE("solver input validation", "[solver]") {
    CHECK_THROWS_AS(Grid1D(1.0, 0.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(Grid1D(0.0, 1.0, 8), std::invalid_argument);
    Grid1D g(-2.0, 2.0, 64);
    SampledField<double> init(g.cell_centers(), std::vector<double>(64, 1.0));
    CHECK_THROWS_AS(solve_hat_diffusion(init, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_hat_diffusion(init, 1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(greens_function_check(FractalIndices(1.0, 1.0), 1.0, 0.0, g),
                    std::domain_error);
    // physical solver needs a face at r = 0, i.e. strictly positive centers
    CHECK_THROWS_AS(
        solve_physical_transport(init, FractalIndices(1.0, 0.5), 1.0, 1.0),
        std::invalid_argument);
}
