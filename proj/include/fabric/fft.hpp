#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace fabric {

/// In-place radix-2 Cooley-Tukey transform; size must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse = false) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_radix2: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const auto u = a[i + j];
                const auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

/// Spectral second derivative of a periodic field sampled on n uniform points
/// spanning one period of length L.
inline std::vector<std::complex<double>> spectral_second_derivative(
    const std::vector<std::complex<double>>& field, double domain_length) {
    if (!(domain_length > 0.0))
        throw std::invalid_argument("spectral_second_derivative: need a positive period");
    auto a = field;
    fft_radix2(a, false);
    const std::size_t n = a.size();
    for (std::size_t m = 0; m < n; ++m) {
        const double freq =
            (m <= n / 2) ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(n);
        const double km = 2.0 * M_PI * freq / domain_length;
        a[m] *= -km * km;
    }
    fft_radix2(a, true);
    return a;
}

}  // namespace fabric
