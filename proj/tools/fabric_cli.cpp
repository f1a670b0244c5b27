// fabric: command-line front end for the anomalous-diffusion numerics library.
//
// Subcommands: pdf, solve, walk, quantum, sweep. All outputs are deterministic
// given the configuration (seeds included): rerunning a command produces
// byte-identical CSV/JSON. Exit codes: 0 success, 1 tolerance failure,
// 2 usage/validation error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fabric/analytic.hpp"
#include "fabric/core.hpp"
#include "fabric/io.hpp"
#include "fabric/quantum.hpp"
#include "fabric/solver.hpp"
#include "fabric/stochastic.hpp"
#include "fabric/svg.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kSchemaVersion = "1";

/// Tolerance failures exit with code 1 (everything else nonzero is usage).
struct ToleranceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// JSON config files mirroring the flags: top-level keys for global options,
/// nested objects for subcommands. Command-line flags override file values.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        return "{}\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j = nlohmann::json::parse(input);
        std::vector<CLI::ConfigItem> out;
        walk(j, {}, out);
        return out;
    }

private:
    static void walk(const nlohmann::json& j, std::vector<std::string> parents,
                     std::vector<CLI::ConfigItem>& out) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it->is_object()) {
                auto deeper = parents;
                deeper.push_back(it.key());
                walk(*it, deeper, out);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = it.key();
            if (it->is_array())
                for (const auto& v : *it) item.inputs.push_back(scalar(v));
            else
                item.inputs.push_back(scalar(*it));
            out.push_back(std::move(item));
        }
    }

    static std::string scalar(const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }
};

struct GlobalOpts {
    std::string out = "fabric-out";
    std::uint64_t seed = 12345;
    std::string format = "csv";
    bool svg = false;
    bool timings = false;
    unsigned threads = 1;
};

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << content;
}

void write_json(const fs::path& path, const ordered_json& j) {
    write_text(path, j.dump(2) + "\n");
}

void archive_config(const fs::path& out_dir, const ordered_json& config) {
    write_json(out_dir / "config.json", config);
}

ordered_json global_json(const GlobalOpts& g) {
    ordered_json j;
    j["out"] = g.out;
    j["seed"] = g.seed;
    j["format"] = g.format;
    j["svg"] = g.svg;
    j["timings"] = g.timings;
    j["threads"] = g.threads;
    return j;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / (n - 1);
    return xs;
}

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return xs;
}

// ---------------------------------------------------------------------------
// pdf
// ---------------------------------------------------------------------------

struct PdfOpts {
    double alpha = 1.0, beta = 1.0;
    int d = 1;
    double diffusivity = 1.0;
    double t = 1.0;
    double x_max = 0.0;  // 0 -> automatic from the packet quantiles
    int n = 2000;
    bool point_values = false;
    double k = 1.0;
    double relax_t_max = 10.0;
    int relax_points = 160;
    std::vector<double> fox;    // B b
    std::vector<double> porta;  // C a v sigma
    double richardson_k0 = 0.0; // > 0 enables the comparison overlay
};

ordered_json pdf_json(const PdfOpts& o) {
    ordered_json j;
    j["alpha"] = o.alpha;
    j["beta"] = o.beta;
    j["d"] = o.d;
    j["D"] = o.diffusivity;
    j["t"] = o.t;
    j["x-max"] = o.x_max;
    j["n"] = o.n;
    j["point-values"] = o.point_values;
    j["k"] = o.k;
    j["relax-t-max"] = o.relax_t_max;
    j["relax-points"] = o.relax_points;
    if (!o.fox.empty()) j["fox"] = o.fox;
    if (!o.porta.empty()) j["porta"] = o.porta;
    if (o.richardson_k0 > 0.0) j["richardson-k0"] = o.richardson_k0;
    return j;
}

int run_pdf(const GlobalOpts& g, const PdfOpts& o, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    fabric::FractalIndices idx(o.alpha, o.beta);
    fabric::StretchedGaussian packet(idx, o.diffusivity, o.d);

    const double xhat_span = 9.0 * std::sqrt(packet.hat_variance(o.t));
    const double X = (o.x_max > 0.0) ? o.x_max : fabric::unhat_space(xhat_span, o.beta);
    const double x_lo = (o.d == 1) ? -X : 0.0;

    const bool with_fox = !o.fox.empty();
    const bool with_porta = !o.porta.empty();
    const bool with_rich = o.richardson_k0 > 0.0;
    fabric::FoxAsymptotic fox(with_fox ? o.fox[0] : 1.0, with_fox ? o.fox[1] : 1.0,
                              std::min(o.alpha, 1.0));
    fabric::RichardsonPdf rich(with_rich ? o.richardson_k0 : 1.0, o.beta, o.d);

    std::ostringstream pdf_os;
    {
        fabric::CsvWriter csv(pdf_os);
        std::vector<const char*> cols{"x", "pdf"};
        if (with_fox) cols.push_back("fox");
        if (with_porta) cols.push_back("porta");
        if (with_rich) cols.push_back("richardson");
        bool first = true;
        for (const char* c : cols) {
            pdf_os << (first ? "" : ",") << c;
            first = false;
        }
        pdf_os << '\n';
        const double h = (X - x_lo) / o.n;
        for (int i = 0; i < o.n; ++i) {
            const double lo = x_lo + i * h;
            const double x = lo + 0.5 * h;
            double v;
            if (o.d == 1)
                v = o.point_values ? fabric::pdf_line(packet, x, o.t)
                                   : fabric::cell_average_line(packet, lo, lo + h, o.t);
            else
                v = fabric::pdf_radial(packet, x, o.t);
            std::vector<double> row{x, v};
            if (with_fox) row.push_back(fox(x, o.t));
            if (with_porta)
                row.push_back(fabric::porta_fit(o.porta[0], o.porta[1], o.porta[2], o.porta[3], x));
            if (with_rich) row.push_back(rich.normalized(std::fabs(x), o.t));
            bool f2 = true;
            for (double val : row) {
                pdf_os << (f2 ? "" : ",") << fabric::format_g17(val);
                f2 = false;
            }
            pdf_os << '\n';
        }
    }
    write_text(out_dir / "pdf.csv", pdf_os.str());

    auto times = linspace(0.0, o.relax_t_max, o.relax_points + 1);
    auto curve = fabric::relaxation_stretched(packet, o.k, times);
    std::ostringstream relax_os;
    fabric::write_relaxation_curve(relax_os, curve);
    write_text(out_dir / "relaxation.csv", relax_os.str());

    if (g.svg) {
        std::vector<double> xs, ys;
        const double h = (X - x_lo) / o.n;
        for (int i = 0; i < o.n; ++i) {
            const double x = x_lo + (i + 0.5) * h;
            xs.push_back(x);
            ys.push_back(o.d == 1 ? fabric::cell_average_line(packet, x - 0.5 * h, x + 0.5 * h, o.t)
                                  : fabric::pdf_radial(packet, x, o.t));
        }
        fabric::SvgPlot plot("density at t = " + fabric::format_g17(o.t), "x", "pdf");
        plot.add_series(xs, ys, "#1f77b4", "stretched gaussian");
        if (with_fox) {
            std::vector<double> os_;
            for (double x : xs) os_.push_back(fox(x, o.t));
            plot.add_series(xs, os_, "#d62728", "fox asymptotic");
        }
        if (with_porta) {
            std::vector<double> os_;
            for (double x : xs)
                os_.push_back(fabric::porta_fit(o.porta[0], o.porta[1], o.porta[2], o.porta[3], x));
            plot.add_series(xs, os_, "#2ca02c", "porta fit");
        }
        if (with_rich) {
            std::vector<double> os_;
            for (double x : xs) os_.push_back(rich.normalized(std::fabs(x), o.t));
            plot.add_series(xs, os_, "#9467bd", "richardson");
        }
        std::ostringstream svg;
        plot.write(svg);
        write_text(out_dir / "pdf.svg", svg.str());

        fabric::SvgPlot rp("mode relaxation, k = " + fabric::format_g17(o.k), "t", "P(k,t)");
        rp.add_series(curve.times, curve.values, "#1f77b4", "");
        std::ostringstream rsvg;
        rp.write(rsvg);
        write_text(out_dir / "relaxation.svg", rsvg.str());
    }

    ordered_json cfg;
    cfg["schema_version"] = kSchemaVersion;
    cfg["command"] = "pdf";
    cfg["global"] = global_json(g);
    cfg["pdf"] = pdf_json(o);
    archive_config(out_dir, cfg);
    return 0;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveCmdOpts {
    std::string model = "present";  // present | richardson | hat
    double alpha = 1.0, beta = 1.0;
    int d = 1;
    double diffusivity = 1.0;
    double k0 = 1.0;
    double t = 1.0;
    int n = 1024;
    double x_max = 0.0;  // 0 -> default domain
    std::string scheme = "implicit";
    std::string bc = "dirichlet";
    double dt = 0.0;
    bool check_green = false;
    double tol = 5e-3;
    std::string init_file;
    double pulse_center = 0.0;
    double pulse_sigma_cells = 3.0;
};

ordered_json solve_json(const SolveCmdOpts& o) {
    ordered_json j;
    j["model"] = o.model;
    j["alpha"] = o.alpha;
    j["beta"] = o.beta;
    j["d"] = o.d;
    j["D"] = o.diffusivity;
    j["k0"] = o.k0;
    j["t"] = o.t;
    j["n"] = o.n;
    j["x-max"] = o.x_max;
    j["scheme"] = o.scheme;
    j["bc"] = o.bc;
    j["dt"] = o.dt;
    j["check-green"] = o.check_green;
    j["tol"] = o.tol;
    if (!o.init_file.empty()) j["init"] = o.init_file;
    j["pulse-center"] = o.pulse_center;
    j["pulse-sigma-cells"] = o.pulse_sigma_cells;
    return j;
}

fabric::SolveOptions make_solver_options(const SolveCmdOpts& o) {
    fabric::SolveOptions opts;
    if (o.scheme == "implicit")
        opts.scheme = fabric::TimeScheme::implicit_euler;
    else if (o.scheme == "cn")
        opts.scheme = fabric::TimeScheme::crank_nicolson;
    else if (o.scheme == "explicit")
        opts.scheme = fabric::TimeScheme::explicit_euler;
    else
        throw CLI::ValidationError("--scheme", "expected implicit|cn|explicit");
    if (o.bc == "dirichlet")
        opts.outer_bc = fabric::BoundaryKind::dirichlet_zero;
    else if (o.bc == "noflux")
        opts.outer_bc = fabric::BoundaryKind::no_flux;
    else
        throw CLI::ValidationError("--bc", "expected dirichlet|noflux");
    opts.dt = o.dt;
    return opts;
}

int run_solve(const GlobalOpts& g, const SolveCmdOpts& o, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    fabric::FractalIndices idx(o.alpha, o.beta);
    const auto opts = make_solver_options(o);

    ordered_json cfg;
    cfg["schema_version"] = kSchemaVersion;
    cfg["command"] = "solve";
    cfg["global"] = global_json(g);
    cfg["solve"] = solve_json(o);
    archive_config(out_dir, cfg);

    if (o.check_green) {
        const double half_width = (o.x_max > 0.0) ? o.x_max : 12.0;  // hatted half-width
        fabric::Grid1D grid(-half_width, half_width, o.n);
        auto report = fabric::greens_function_check(idx, o.diffusivity, o.t, grid, opts);
        ordered_json rj;
        rj["schema_version"] = kSchemaVersion;
        rj["check"] = "greens_function";
        rj["alpha"] = o.alpha;
        rj["beta"] = o.beta;
        rj["l2_rel_error"] = report.l2_rel_error;
        rj["linf_rel_error"] = report.linf_rel_error;
        rj["grid"] = {{"x_min", report.grid.x_min},
                      {"x_max", report.grid.x_max},
                      {"n", report.grid.n}};
        rj["steps"] = report.steps;
        rj["tol"] = o.tol;
        rj["pass"] = report.l2_rel_error <= o.tol;
        if (g.timings) rj["wall_time_seconds"] = report.wall_time;
        write_json(out_dir / "report.json", rj);
        if (!(report.l2_rel_error <= o.tol))
            throw ToleranceFailure("greens-function check failed: l2 " +
                                   fabric::format_g17(report.l2_rel_error) + " > tol " +
                                   fabric::format_g17(o.tol));
        return 0;
    }

    // initial condition
    fabric::SampledField<double> init({0.0, 1.0}, {0.0, 0.0});
    bool have_init = false;
    if (!o.init_file.empty()) {
        std::ifstream is(o.init_file);
        if (!is) throw CLI::ValidationError("--init", "cannot open " + o.init_file);
        init = fabric::read_field_csv(is);
        have_init = true;
    }

    fabric::SolveDiagnostics diag;
    fabric::SampledField<double> solution({0.0, 1.0}, {0.0, 0.0});
    if (o.model == "hat") {
        const double X = (o.x_max > 0.0) ? o.x_max : 16.0;
        if (!have_init) {
            fabric::Grid1D grid(-X, X, o.n);
            init = fabric::gaussian_pulse(grid.cell_centers(), o.pulse_center,
                                          o.pulse_sigma_cells * grid.dx(), grid.dx());
        }
        solution =
            fabric::solve_hat_diffusion(init, o.diffusivity, fabric::hat_time(o.t, o.alpha), opts, &diag);
    } else if (o.model == "present" || o.model == "richardson") {
        const double X = (o.x_max > 0.0) ? o.x_max : 16.0;
        if (!have_init) {
            std::vector<double> centers(o.n);
            const double h = X / o.n;
            for (int i = 0; i < o.n; ++i) centers[i] = (i + 0.5) * h;
            init = fabric::gaussian_pulse(centers, o.pulse_center, o.pulse_sigma_cells * h, h);
        }
        if (o.model == "present")
            solution = fabric::solve_physical_transport(init, idx, o.diffusivity, o.t, opts,
                                                        fabric::PhysicalForm::conservative, &diag);
        else
            solution = fabric::solve_richardson(init, o.k0, o.beta, o.d, o.t, opts, &diag);
    } else {
        throw CLI::ValidationError("--model", "expected present|richardson|hat");
    }

    std::ostringstream sol_os;
    fabric::write_field_csv(sol_os, solution);
    write_text(out_dir / "solution.csv", sol_os.str());

    ordered_json rj;
    rj["schema_version"] = kSchemaVersion;
    rj["model"] = o.model;
    rj["alpha"] = o.alpha;
    rj["beta"] = o.beta;
    rj["t"] = o.t;
    rj["n"] = static_cast<int>(solution.size());
    rj["steps"] = diag.steps;
    rj["dt"] = diag.dt;
    rj["mass_initial"] = diag.mass_initial;
    rj["mass_final"] = diag.mass_final;
    rj["min_value"] = diag.min_value;
    if (g.timings) rj["wall_time_seconds"] = diag.wall_seconds;
    write_json(out_dir / "report.json", rj);

    if (g.svg) {
        fabric::SvgPlot plot("solution at t = " + fabric::format_g17(o.t), "x", "u");
        plot.add_series(solution.nodes(), solution.values(), "#1f77b4", o.model);
        std::ostringstream svg;
        plot.write(svg);
        write_text(out_dir / "solution.svg", svg.str());
    }
    return 0;
}

// ---------------------------------------------------------------------------
// walk
// ---------------------------------------------------------------------------

struct WalkOpts {
    double alpha = 1.0, beta = 1.0;
    double diffusivity = 1.0;
    std::size_t n = 10000;
    double t_min = 0.1, t_max = 10.0;
    int points = 12;
    bool fit_eta = false;
    double expect_eta = -1.0;  // < 0: no gate
    double eta_tol = 0.05;
    double levy = 0.0;  // > 0 switches to stable-sampling mode (value = stability index)
    double moment = 2.0;
    bool demo_divergence = false;
    std::vector<std::size_t> sizes;
    std::size_t seeds = 20;
    bool snapshot = false;
};

ordered_json walk_json(const WalkOpts& o) {
    ordered_json j;
    j["alpha"] = o.alpha;
    j["beta"] = o.beta;
    j["D"] = o.diffusivity;
    j["n"] = o.n;
    j["t-min"] = o.t_min;
    j["t-max"] = o.t_max;
    j["points"] = o.points;
    j["fit-eta"] = o.fit_eta;
    if (o.expect_eta >= 0.0) {
        j["expect-eta"] = o.expect_eta;
        j["eta-tol"] = o.eta_tol;
    }
    if (o.levy > 0.0) {
        j["levy"] = o.levy;
        j["moment"] = o.moment;
        j["demo-divergence"] = o.demo_divergence;
        j["sizes"] = o.sizes;
        j["seeds"] = o.seeds;
    }
    j["snapshot"] = o.snapshot;
    return j;
}

int run_walk(const GlobalOpts& g, const WalkOpts& o, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    ordered_json cfg;
    cfg["schema_version"] = kSchemaVersion;
    cfg["command"] = "walk";
    cfg["global"] = global_json(g);
    WalkOpts archived = o;
    if (archived.levy > 0.0 && archived.demo_divergence && archived.sizes.empty())
        archived.sizes = {1000, 3162, 10000, 31623, 100000, 316228, 1000000};
    cfg["walk"] = walk_json(archived);
    archive_config(out_dir, cfg);

    if (o.levy > 0.0) {
        if (o.demo_divergence) {
            auto sizes = archived.sizes;
            auto table =
                fabric::diverging_moment_demo(o.levy, o.moment, sizes, o.seeds, g.seed, g.threads);
            std::ostringstream os;
            fabric::CsvWriter csv(os);
            csv.header({"size", "moment_mean", "moment_min", "moment_max"});
            for (std::size_t j = 0; j < sizes.size(); ++j) {
                double lo = table.moments[0][j], hi = lo, sum = 0.0;
                for (std::size_t s = 0; s < o.seeds; ++s) {
                    lo = std::min(lo, table.moments[s][j]);
                    hi = std::max(hi, table.moments[s][j]);
                    sum += table.moments[s][j];
                }
                csv.row({static_cast<double>(sizes[j]), sum / static_cast<double>(o.seeds), lo, hi});
            }
            write_text(out_dir / "divergence.csv", os.str());

            ordered_json dj;
            dj["schema_version"] = kSchemaVersion;
            dj["stability"] = table.stability;
            dj["order"] = table.order;
            dj["mean_kendall_s"] = table.mean_kendall_s;
            dj["bootstrap_q01"] = table.bootstrap_q01;
            dj["increasing_at_99"] = table.increasing_at_99();
            dj["tail_rel_change"] = table.tail_rel_change;
            dj["stabilized"] = table.stabilized();
            write_json(out_dir / "divergence.json", dj);
            return 0;
        }
        auto xs = fabric::sample_levy(o.levy, o.n, g.seed);
        std::ostringstream os;
        fabric::CsvWriter csv(os);
        csv.header({"i", "x"});
        for (std::size_t i = 0; i < xs.size(); ++i) csv.row({static_cast<double>(i), xs[i]});
        write_text(out_dir / "positions.csv", os.str());
        return 0;
    }

    fabric::FractalIndices idx(o.alpha, o.beta);
    auto schedule = logspace(o.t_min, o.t_max, o.points);
    auto result = fabric::walk_ensemble(idx, o.diffusivity, schedule, o.n, g.seed, g.threads);

    std::ostringstream os;
    fabric::CsvWriter csv(os);
    csv.header({"t", "msd", "msd_sem", "m2beta", "m2beta_sem"});
    for (std::size_t j = 0; j < schedule.size(); ++j)
        csv.row({result.series.times[j], result.series.msd[j], result.series.msd_sem[j],
                 result.series.m2beta[j], result.series.m2beta_sem[j]});
    write_text(out_dir / "moments.csv", os.str());

    if (o.snapshot) {
        std::ostringstream ps;
        fabric::CsvWriter pcsv(ps);
        pcsv.header({"i", "x"});
        for (std::size_t i = 0; i < result.final_state.positions.size(); ++i)
            pcsv.row({static_cast<double>(i), result.final_state.positions[i]});
        write_text(out_dir / "positions.csv", ps.str());
    }

    if (g.svg) {
        fabric::SvgPlot plot("mean square displacement", "t", "<x^2>");
        plot.add_series(result.series.times, result.series.msd, "#1f77b4", "msd");
        std::ostringstream svg;
        plot.write(svg);
        write_text(out_dir / "msd.svg", svg.str());
    }

    if (o.fit_eta) {
        auto fit = fabric::estimate_msd_exponent(result.series);
        ordered_json fj;
        fj["schema_version"] = kSchemaVersion;
        fj["eta_hat"] = fit.eta_hat;
        fj["stderr"] = fit.stderr_slope;
        fj["t_min"] = fit.t_min;
        fj["t_max"] = fit.t_max;
        fj["points"] = fit.points;
        fj["eta_theory"] = idx.msd_exponent();
        write_json(out_dir / "msd_fit.json", fj);
        if (o.expect_eta >= 0.0 && std::fabs(fit.eta_hat - o.expect_eta) > o.eta_tol)
            throw ToleranceFailure("eta_hat " + fabric::format_g17(fit.eta_hat) +
                                   " outside +-" + fabric::format_g17(o.eta_tol) + " of " +
                                   fabric::format_g17(o.expect_eta));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// quantum
// ---------------------------------------------------------------------------

struct QuantumOpts {
    double alpha = 1.0, beta = 1.0;
    double h_alpha = 1.0, h_beta = 1.0, mass = 1.0;
    double k_max = 10.0;
    int points = 128;
    bool verify_plane_wave = false;
    double k = 2.0;
    double nu_scale = 1.0;
    double residual_tol = 1e-6;
    std::size_t n_x = 256;
    std::size_t wavelengths = 4;
    double t_hat = 1.0;
    double dt_hat = 1e-3;
};

ordered_json quantum_json(const QuantumOpts& o) {
    ordered_json j;
    j["alpha"] = o.alpha;
    j["beta"] = o.beta;
    j["h-alpha"] = o.h_alpha;
    j["h-beta"] = o.h_beta;
    j["mass"] = o.mass;
    j["k-max"] = o.k_max;
    j["points"] = o.points;
    j["verify-plane-wave"] = o.verify_plane_wave;
    j["k"] = o.k;
    j["nu-scale"] = o.nu_scale;
    j["residual-tol"] = o.residual_tol;
    j["n-x"] = o.n_x;
    j["wavelengths"] = o.wavelengths;
    j["t-hat"] = o.t_hat;
    j["dt-hat"] = o.dt_hat;
    return j;
}

int run_quantum(const GlobalOpts& g, const QuantumOpts& o, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    fabric::QuantumFabric qf(fabric::FractalIndices(o.alpha, o.beta), o.h_alpha, o.h_beta,
                             o.mass);

    ordered_json cfg;
    cfg["schema_version"] = kSchemaVersion;
    cfg["command"] = "quantum";
    cfg["global"] = global_json(g);
    cfg["quantum"] = quantum_json(o);
    archive_config(out_dir, cfg);

    auto ks = linspace(0.0, o.k_max, o.points + 1);
    std::ostringstream os;
    fabric::write_dispersion_csv(os, qf, ks);
    write_text(out_dir / "dispersion.csv", os.str());

    if (g.svg) {
        std::vector<double> nus;
        for (double k : ks) nus.push_back(fabric::free_dispersion(qf, k));
        fabric::SvgPlot plot("free dispersion", "k", "nu");
        plot.add_series(ks, nus, "#1f77b4", "");
        std::ostringstream svg;
        plot.write(svg);
        write_text(out_dir / "dispersion.svg", svg.str());
    }

    if (o.verify_plane_wave) {
        fabric::PlaneWaveCheck check;
        check.n_x = o.n_x;
        check.wavelengths = o.wavelengths;
        check.t_hat = o.t_hat;
        check.dt_hat = o.dt_hat;
        check.frequency_scale = o.nu_scale;
        const double residual = fabric::plane_wave_residual(qf, o.k, check);
        ordered_json rj;
        rj["schema_version"] = kSchemaVersion;
        rj["k"] = o.k;
        rj["nu_scale"] = o.nu_scale;
        rj["residual"] = residual;
        rj["tol"] = o.residual_tol;
        rj["pass"] = residual <= o.residual_tol;
        write_json(out_dir / "residual.json", rj);
        if (!(residual <= o.residual_tol))
            throw ToleranceFailure("plane-wave residual " + fabric::format_g17(residual) +
                                   " > tol " + fabric::format_g17(o.residual_tol));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepOpts {
    std::string cmd = "pdf";
    std::vector<double> alphas{0.5, 1.0};
    std::vector<double> betas{0.5, 1.0};
    double t = 1.0;
    double diffusivity = 1.0;
    std::size_t n_walkers = 20000;
};

std::string fabric_tag(double alpha, double beta) {
    std::ostringstream os;
    os << "alpha" << alpha << "_beta" << beta;
    return os.str();
}

int run_sweep(const GlobalOpts& g, const SweepOpts& o, const fs::path& out_dir) {
    fs::create_directories(out_dir);

    struct Combo {
        double alpha, beta;
        double metric = 0.0;
    };
    std::vector<Combo> combos;
    for (double a : o.alphas)
        for (double b : o.betas) combos.push_back({a, b, 0.0});

    auto run_one = [&](Combo& c) {
        const fs::path sub = out_dir / fabric_tag(c.alpha, c.beta);
        if (o.cmd == "pdf") {
            PdfOpts p;
            p.alpha = c.alpha;
            p.beta = c.beta;
            p.t = o.t;
            p.diffusivity = o.diffusivity;
            run_pdf(g, p, sub);
            // metric: Riemann mass of the emitted curve
            std::ifstream is(sub / "pdf.csv");
            auto field = fabric::read_field_csv(is);
            const double h = field.node(1) - field.node(0);
            double mass = 0.0;
            for (std::size_t i = 0; i < field.size(); ++i) mass += field.value(i) * h;
            c.metric = mass;
        } else if (o.cmd == "walk") {
            WalkOpts w;
            w.alpha = c.alpha;
            w.beta = c.beta;
            w.diffusivity = o.diffusivity;
            w.n = o.n_walkers;
            w.fit_eta = true;
            run_walk(g, w, sub);
            std::ifstream is(sub / "msd_fit.json");
            nlohmann::json j = nlohmann::json::parse(is);
            c.metric = j["eta_hat"].get<double>();
        } else if (o.cmd == "quantum") {
            QuantumOpts q;
            q.alpha = c.alpha;
            q.beta = c.beta;
            run_quantum(g, q, sub);
            // metric: worst relative closure error of E(nu(k)) = p^2/2m
            fabric::QuantumFabric qf(fabric::FractalIndices(c.alpha, c.beta), 1.0, 1.0, 1.0);
            double worst = 0.0;
            for (double k = 0.5; k <= 100.0; k *= 2.0) {
                const double e = fabric::energy_of_frequency(qf, fabric::free_dispersion(qf, k));
                const double ref = std::pow(fabric::momentum_of_wavenumber(qf, k), 2) / 2.0;
                worst = std::max(worst, std::fabs(e / ref - 1.0));
            }
            c.metric = worst;
        } else {
            throw CLI::ValidationError("--cmd", "expected pdf|walk|quantum");
        }
    };

    if (g.threads > 1) {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < g.threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < combos.size(); i += g.threads) run_one(combos[i]);
            });
        for (auto& th : pool) th.join();
    } else {
        for (auto& c : combos) run_one(c);
    }

    std::ostringstream os;
    fabric::CsvWriter csv(os);
    csv.header({"alpha", "beta", "metric"});
    for (const auto& c : combos) csv.row({c.alpha, c.beta, c.metric});
    write_text(out_dir / "summary.csv", os.str());

    ordered_json cfg;
    cfg["schema_version"] = kSchemaVersion;
    cfg["command"] = "sweep";
    cfg["global"] = global_json(g);
    ordered_json sj;
    sj["cmd"] = o.cmd;
    sj["alphas"] = o.alphas;
    sj["betas"] = o.betas;
    sj["t"] = o.t;
    sj["D"] = o.diffusivity;
    sj["n-walkers"] = o.n_walkers;
    cfg["sweep"] = sj;
    archive_config(out_dir, cfg);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fabric: anomalous-diffusion numerics on fractal time-space"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file mirroring the flags (flags override)");

    GlobalOpts g;
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
    app.add_option("--format", g.format, "table format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_flag("--svg", g.svg, "also write SVG plots");
    app.add_flag("--timings", g.timings, "include wall times in JSON reports (breaks byte-stable output)");
    app.add_option("--threads", g.threads, "worker threads for sweeps/ensembles")
        ->capture_default_str();

    PdfOpts pdf;
    auto* pdf_cmd = app.add_subcommand("pdf", "analytic densities and mode relaxation")->fallthrough();
    pdf_cmd->add_option("--alpha", pdf.alpha, "time scaling exponent in (0,1]")->required();
    pdf_cmd->add_option("--beta", pdf.beta, "space scaling exponent in (0,1]")->required();
    pdf_cmd->add_option("--d", pdf.d, "dimensionality (1 = line, >1 = radial)")
        ->capture_default_str();
    pdf_cmd->add_option("--D", pdf.diffusivity, "diffusivity")->capture_default_str();
    pdf_cmd->add_option("--t", pdf.t, "evaluation time (> 0)")->capture_default_str();
    pdf_cmd->add_option("--x-max", pdf.x_max, "half-width of the x range (0 = auto)")
        ->capture_default_str();
    pdf_cmd->add_option("-n,--n", pdf.n, "number of cells")->capture_default_str();
    pdf_cmd->add_flag("--point-values", pdf.point_values,
                      "emit point densities instead of cell averages");
    pdf_cmd->add_option("--k", pdf.k, "wavenumber for the relaxation curve")
        ->capture_default_str();
    pdf_cmd->add_option("--relax-t-max", pdf.relax_t_max, "relaxation curve horizon")
        ->capture_default_str();
    pdf_cmd->add_option("--relax-points", pdf.relax_points, "relaxation curve points")
        ->capture_default_str();
    pdf_cmd->add_option("--fox", pdf.fox, "overlay: B b")->expected(2);
    pdf_cmd->add_option("--porta", pdf.porta, "overlay: C a v sigma")->expected(4);
    pdf_cmd->add_option("--richardson-k0", pdf.richardson_k0,
                        "overlay: scale-dependent comparison pdf with this k0");

    SolveCmdOpts solve;
    auto* solve_cmd = app.add_subcommand("solve", "finite-difference transport solvers")->fallthrough();
    solve_cmd->add_option("--model", solve.model, "present|richardson|hat")
        ->capture_default_str();
    solve_cmd->add_option("--alpha", solve.alpha, "time scaling exponent")->capture_default_str();
    solve_cmd->add_option("--beta", solve.beta, "space scaling exponent")->capture_default_str();
    solve_cmd->add_option("--d", solve.d, "radial dimension (richardson)")->capture_default_str();
    solve_cmd->add_option("--D", solve.diffusivity, "diffusivity (present/hat)")
        ->capture_default_str();
    solve_cmd->add_option("--k0", solve.k0, "diffusivity scale (richardson)")
        ->capture_default_str();
    solve_cmd->add_option("--t", solve.t, "final physical time")->capture_default_str();
    solve_cmd->add_option("-n,--n", solve.n, "cells")->capture_default_str();
    solve_cmd->add_option("--x-max", solve.x_max, "domain extent (0 = default)")
        ->capture_default_str();
    solve_cmd->add_option("--scheme", solve.scheme, "implicit|cn|explicit")
        ->capture_default_str();
    solve_cmd->add_option("--bc", solve.bc, "outer boundary: dirichlet|noflux")
        ->capture_default_str();
    solve_cmd->add_option("--dt", solve.dt, "time step (0 = auto)")->capture_default_str();
    solve_cmd->add_flag("--check-green", solve.check_green,
                        "run the Green's-function verification and gate on --tol");
    solve_cmd->add_option("--tol", solve.tol, "acceptance tolerance for --check-green")
        ->capture_default_str();
    solve_cmd->add_option("--init", solve.init_file, "initial condition CSV (x,u)");
    solve_cmd->add_option("--pulse-center", solve.pulse_center, "pulse center")
        ->capture_default_str();
    solve_cmd->add_option("--pulse-sigma-cells", solve.pulse_sigma_cells,
                          "pulse width in cells")
        ->capture_default_str();

    WalkOpts walk;
    auto* walk_cmd = app.add_subcommand("walk", "Monte Carlo walker ensembles")->fallthrough();
    walk_cmd->add_option("--alpha", walk.alpha, "time scaling exponent")->capture_default_str();
    walk_cmd->add_option("--beta", walk.beta, "space scaling exponent")->capture_default_str();
    walk_cmd->add_option("--D", walk.diffusivity, "diffusivity")->capture_default_str();
    walk_cmd->add_option("-n,--n", walk.n, "walkers (or stable samples)")->capture_default_str();
    walk_cmd->add_option("--t-min", walk.t_min, "first observation time")->capture_default_str();
    walk_cmd->add_option("--t-max", walk.t_max, "last observation time")->capture_default_str();
    walk_cmd->add_option("--points", walk.points, "observation times (log spaced)")
        ->capture_default_str();
    walk_cmd->add_flag("--fit-eta", walk.fit_eta, "fit the MSD scaling exponent");
    walk_cmd->add_option("--expect-eta", walk.expect_eta,
                         "gate: exit 1 unless |eta_hat - value| <= --eta-tol");
    walk_cmd->add_option("--eta-tol", walk.eta_tol, "gate tolerance")->capture_default_str();
    walk_cmd->add_option("--levy", walk.levy,
                         "stable-sampling mode with this stability index (0,2)");
    walk_cmd->add_option("--moment", walk.moment, "absolute moment order for the demo")
        ->capture_default_str();
    walk_cmd->add_flag("--demo-divergence", walk.demo_divergence,
                       "moment growth table across sample sizes and seeds");
    walk_cmd->add_option("--sizes", walk.sizes, "sample sizes for the demo");
    walk_cmd->add_option("--seeds", walk.seeds, "seed count for the demo")
        ->capture_default_str();
    walk_cmd->add_flag("--snapshot", walk.snapshot, "dump final walker positions");

    QuantumOpts quantum;
    auto* quantum_cmd = app.add_subcommand("quantum", "fractional quantum relations")->fallthrough();
    quantum_cmd->add_option("--alpha", quantum.alpha, "time scaling exponent")
        ->capture_default_str();
    quantum_cmd->add_option("--beta", quantum.beta, "space scaling exponent")
        ->capture_default_str();
    quantum_cmd->add_option("--h-alpha", quantum.h_alpha, "scaled Planck constant (time)")
        ->capture_default_str();
    quantum_cmd->add_option("--h-beta", quantum.h_beta, "scaled Planck constant (space)")
        ->capture_default_str();
    quantum_cmd->add_option("--mass", quantum.mass, "particle mass")->capture_default_str();
    quantum_cmd->add_option("--k-max", quantum.k_max, "dispersion table upper wavenumber")
        ->capture_default_str();
    quantum_cmd->add_option("--points", quantum.points, "dispersion table rows - 1")
        ->capture_default_str();
    quantum_cmd->add_flag("--verify-plane-wave", quantum.verify_plane_wave,
                          "check the plane-wave residual and gate on --residual-tol");
    quantum_cmd->add_option("--k", quantum.k, "wavenumber for the residual check")
        ->capture_default_str();
    quantum_cmd->add_option("--nu-scale", quantum.nu_scale,
                            "frequency perturbation (negative control)")
        ->capture_default_str();
    quantum_cmd->add_option("--residual-tol", quantum.residual_tol, "residual gate")
        ->capture_default_str();
    quantum_cmd->add_option("--n-x", quantum.n_x, "spatial points (power of two)")
        ->capture_default_str();
    quantum_cmd->add_option("--wavelengths", quantum.wavelengths, "periods in the domain")
        ->capture_default_str();
    quantum_cmd->add_option("--t-hat", quantum.t_hat, "hatted-time expansion point")
        ->capture_default_str();
    quantum_cmd->add_option("--dt-hat", quantum.dt_hat, "hatted-time stencil spacing")
        ->capture_default_str();

    SweepOpts sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "fabric-grid parameter sweeps")->fallthrough();
    sweep_cmd->add_option("--cmd", sweep.cmd, "pdf|walk|quantum")->capture_default_str();
    sweep_cmd->add_option("--alphas", sweep.alphas, "time exponents")->capture_default_str();
    sweep_cmd->add_option("--betas", sweep.betas, "space exponents")->capture_default_str();
    sweep_cmd->add_option("--t", sweep.t, "evaluation time")->capture_default_str();
    sweep_cmd->add_option("--D", sweep.diffusivity, "diffusivity")->capture_default_str();
    sweep_cmd->add_option("--n-walkers", sweep.n_walkers, "walkers per combo (walk)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const fs::path out_dir(g.out);
        if (pdf_cmd->parsed()) return run_pdf(g, pdf, out_dir);
        if (solve_cmd->parsed()) return run_solve(g, solve, out_dir);
        if (walk_cmd->parsed()) return run_walk(g, walk, out_dir);
        if (quantum_cmd->parsed()) return run_quantum(g, quantum, out_dir);
        if (sweep_cmd->parsed()) return run_sweep(g, sweep, out_dir);
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const ToleranceFailure& e) {
        std::cerr << "tolerance failure: " << e.what() << '\n';
        return 1;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n' << app.help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
