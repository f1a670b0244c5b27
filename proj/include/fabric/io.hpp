#pragma once

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include "fabric/analytic.hpp"
#include "fabric/core.hpp"
#include "fabric/quantum.hpp"

namespace fabric {

/// 17 significant digits: enough to round-trip any double, and stable bytes
/// for golden-file comparison.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Comma-separated, '.' decimal, header row, one record per line.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(std::initializer_list<const char*> names) {
        bool first = true;
        for (const char* n : names) {
            if (!first) os_ << ',';
            os_ << n;
            first = false;
        }
        os_ << '\n';
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) os_ << ',';
            os_ << format_g17(v);
            first = false;
        }
        os_ << '\n';
    }

private:
    std::ostream& os_;
};

/// Density curve on cell-centered abscissae. Cell-averaged values (default)
/// come from the closed-form cdf, so the emitted rows Riemann-sum to the true
/// mass even across the x = 0 singularity; point values are the raw density
/// (infinite at 0 for beta < 1, which cell centering avoids hitting).
inline void write_pdf_curve(std::ostream& os, const StretchedGaussian& g, double t,
                            double x_min, double x_max, int n_cells,
                            bool cell_averaged = true) {
    if (n_cells < 2) throw std::invalid_argument("write_pdf_curve: need at least 2 cells");
    CsvWriter csv(os);
    csv.header({"x", "pdf"});
    const double h = (x_max - x_min) / n_cells;
    for (int i = 0; i < n_cells; ++i) {
        const double lo = x_min + i * h;
        const double x = lo + 0.5 * h;
        const double v = cell_averaged ? cell_average_line(g, lo, lo + h, t) : pdf_line(g, x, t);
        csv.row({x, v});
    }
}

inline void write_relaxation_curve(std::ostream& os, const RelaxationCurve& curve) {
    CsvWriter csv(os);
    csv.header({"t", "relaxation"});
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        csv.row({curve.times[i], curve.values[i]});
}

inline void write_field_csv(std::ostream& os, const SampledField<double>& field,
                            const char* xname = "x", const char* vname = "u") {
    CsvWriter csv(os);
    csv.header({xname, vname});
    for (std::size_t i = 0; i < field.size(); ++i) csv.row({field.node(i), field.value(i)});
}

/// Read a two-column CSV (with header) back into a field.
inline SampledField<double> read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("read_field_csv: empty input");
    std::vector<double> xs, vs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("read_field_csv: expected two comma-separated columns");
        xs.push_back(std::stod(line.substr(0, comma)));
        vs.push_back(std::stod(line.substr(comma + 1)));
    }
    return SampledField<double>(std::move(xs), std::move(vs));
}

/// Dispersion table (k, nu, E, p).
inline void write_dispersion_csv(std::ostream& os, const QuantumFabric& qf,
                                 const std::vector<double>& ks) {
    CsvWriter csv(os);
    csv.header({"k", "nu", "E", "p"});
    for (double k : ks) {
        const double nu = free_dispersion(qf, k);
        csv.row({k, nu, energy_of_frequency(qf, nu), momentum_of_wavenumber(qf, k)});
    }
}

}  // namespace fabric
