#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "fabric/core.hpp"
#include "fabric/errors.hpp"
#include "fabric/fft.hpp"

namespace fabric {

/// Scaled quantum constants on a fabric S^{alpha,beta}: h_alpha carries
/// energy * time^alpha, h_beta carries momentum * length^beta. They are free
/// positive parameters of the fabric, never converted between fabrics; at
/// alpha = beta = 1 with h_alpha = h_beta = hbar the classical relations
/// come back.
class QuantumFabric {
public:
    QuantumFabric(FractalIndices idx, double h_alpha, double h_beta, double mass)
        : idx_(idx), h_alpha_(h_alpha), h_beta_(h_beta), mass_(mass) {
        if (!(h_alpha > 0.0) || !(h_beta > 0.0))
            throw std::invalid_argument("QuantumFabric: scaled constants must be > 0");
        if (!(mass > 0.0)) throw std::invalid_argument("QuantumFabric: mass must be > 0");
    }

    const FractalIndices& indices() const noexcept { return idx_; }
    double alpha() const noexcept { return idx_.alpha(); }
    double beta() const noexcept { return idx_.beta(); }
    double h_alpha() const noexcept { return h_alpha_; }
    double h_beta() const noexcept { return h_beta_; }
    double mass() const noexcept { return mass_; }

private:
    FractalIndices idx_;
    double h_alpha_;
    double h_beta_;
    double mass_;
};

/// E = h_alpha nu^alpha (linear Planck relation in the hatted frequency).
inline double energy_of_frequency(const QuantumFabric& qf, double nu) {
    if (nu < 0.0) throw std::domain_error("energy_of_frequency: frequency must be >= 0");
    return qf.h_alpha() * hat_time(nu, qf.alpha());
}

/// p = h_beta k^beta.
inline double momentum_of_wavenumber(const QuantumFabric& qf, double k) {
    if (k < 0.0) throw std::domain_error("momentum_of_wavenumber: wavenumber must be >= 0");
    return qf.h_beta() * hat_time(k, qf.beta());
}

/// Free-particle dispersion: the nu solving h_alpha nu^alpha = p(k)^2 / 2m,
/// i.e. nu = [h_beta^2 k^{2 beta} / (2 m h_alpha)]^{1/alpha}. The kinetic
/// energy keeps its classical form |p|^2/2m.
inline double free_dispersion(const QuantumFabric& qf, double k) {
    if (k < 0.0) throw std::domain_error("free_dispersion: wavenumber must be >= 0");
    if (k == 0.0) return 0.0;
    const double p = momentum_of_wavenumber(qf, k);
    const double e_over_h = p * p / (2.0 * qf.mass() * qf.h_alpha());
    return unhat_time(e_over_h, qf.alpha());
}

/// Grid and stencil controls for the plane-wave residual check.
struct PlaneWaveCheck {
    std::size_t n_x = 256;         // spatial points (power of two)
    std::size_t wavelengths = 4;   // periods spanned by the domain
    double t_hat = 1.0;            // hatted-time expansion point
    double dt_hat = 1e-3;          // hatted-time stencil spacing
    double frequency_scale = 1.0;  // multiplies the physical frequency (negative control)
};

/// Residual of the free Schrodinger equation in hatted coordinates,
///   i h_alpha dPsi/dt_hat = -(h_beta^2 / 2m) d^2 Psi/dx_hat^2,
/// evaluated on the plane wave Psi = exp(i(k_hat x_hat - nu_hat t_hat)) with
/// nu from free_dispersion. Spatial derivative is spectral (FFT) on a
/// periodic hat grid; the time derivative goes through the numerical
/// Hausdorff derivative on physical time nodes. Returns max|residual| / max|Psi|.
inline double plane_wave_residual(const QuantumFabric& qf, double k,
                                  const PlaneWaveCheck& check = {}) {
    if (k < 0.0) throw std::domain_error("plane_wave_residual: wavenumber must be >= 0");
    if (k == 0.0) return 0.0;
    if (check.n_x < 16 || (check.n_x & (check.n_x - 1)) != 0)
        throw ConfigError("plane_wave_residual: n_x must be a power of two >= 16");
    if (check.wavelengths < 1) throw ConfigError("plane_wave_residual: need >= 1 wavelength");
    if (check.n_x / check.wavelengths < 16)
        throw ConfigError("plane_wave_residual: fewer than 16 points per wavelength");
    if (!(check.t_hat > check.dt_hat) || !(check.dt_hat > 0.0))
        throw ConfigError("plane_wave_residual: need t_hat > dt_hat > 0");

    using cd = std::complex<double>;
    const double alpha = qf.alpha();
    const double k_hat = hat_time(k, qf.beta());
    const double nu = free_dispersion(qf, k) * check.frequency_scale;
    const double nu_hat = hat_time(nu, alpha);
    const double L = check.wavelengths * 2.0 * M_PI / k_hat;

    // physical time nodes whose hatted images are uniformly spaced
    const double th[3] = {check.t_hat - check.dt_hat, check.t_hat, check.t_hat + check.dt_hat};
    std::vector<double> t_nodes(3);
    for (int i = 0; i < 3; ++i) t_nodes[i] = unhat_time(th[i], alpha);

    std::vector<cd> psi_mid(check.n_x);
    std::vector<cd> dpsi_dt_hat(check.n_x);
    for (std::size_t j = 0; j < check.n_x; ++j) {
        const double xh = L * static_cast<double>(j) / static_cast<double>(check.n_x);
        std::vector<cd> over_time(3);
        for (int i = 0; i < 3; ++i)
            over_time[i] = std::exp(cd(0.0, k_hat * xh - nu_hat * th[i]));
        psi_mid[j] = over_time[1];
        SampledField<cd> g(t_nodes, over_time);
        dpsi_dt_hat[j] = hausdorff_derivative(g, alpha, 1);
    }

    const auto d2 = spectral_second_derivative(psi_mid, L);
    double worst = 0.0;
    const cd i_unit(0.0, 1.0);
    for (std::size_t j = 0; j < check.n_x; ++j) {
        const cd residual = i_unit * qf.h_alpha() * dpsi_dt_hat[j] +
                            qf.h_beta() * qf.h_beta() / (2.0 * qf.mass()) * d2[j];
        worst = std::max(worst, std::abs(residual));
    }
    return worst;  // |Psi| = 1, so this is already relative
}

}  // namespace fabric
