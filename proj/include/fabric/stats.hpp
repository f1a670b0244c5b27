#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fabric/rng.hpp"

namespace fabric {

/// Cascade summation with a fixed association order. Reductions built on this
/// are bitwise independent of how the work was split across threads.
inline double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;  // unbiased
    std::size_t n = 0;
    double sem() const { return n > 1 ? std::sqrt(var / static_cast<double>(n)) : 0.0; }
};

inline MeanVar mean_variance(const std::vector<double>& v) {
    MeanVar out;
    out.n = v.size();
    if (v.empty()) return out;
    out.mean = pairwise_sum(v) / static_cast<double>(v.size());
    if (v.size() < 2) return out;
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = v[i] - out.mean;
        sq[i] = d * d;
    }
    out.var = pairwise_sum(sq) / static_cast<double>(v.size() - 1);
    return out;
}

/// Two-sided Kolmogorov-Smirnov statistic of a sample against a cdf.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max(d, std::fabs(F - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - F));
    }
    return d;
}

/// Asymptotic two-sided KS critical value at significance level `alpha_level`.
inline double ks_critical(std::size_t n, double alpha_level) {
    return std::sqrt(-0.5 * std::log(alpha_level / 2.0)) / std::sqrt(static_cast<double>(n));
}

/// Standard normal quantile (Acklam's rational approximation, |error| < 1.2e-9).
inline double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

/// Chi-square quantile via the Wilson-Hilferty cube approximation.
inline double chi2_quantile(double dof, double p) {
    const double z = normal_quantile(p);
    const double c = 2.0 / (9.0 * dof);
    const double w = 1.0 - c + z * std::sqrt(c);
    return dof * w * w * w;
}

/// Pearson statistic for observed counts against expected probabilities.
inline double chi2_statistic(const std::vector<std::size_t>& counts,
                             const std::vector<double>& probs, std::size_t n_total) {
    if (counts.size() != probs.size())
        throw std::invalid_argument("chi2_statistic: size mismatch");
    double chi2 = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = probs[i] * static_cast<double>(n_total);
        if (!(expected > 0.0)) throw std::invalid_argument("chi2_statistic: empty expected bin");
        const double d = static_cast<double>(counts[i]) - expected;
        chi2 += d * d / expected;
    }
    return chi2;
}

/// Mann-Kendall trend statistic S = sum_{i<j} sign(x_j - x_i).
inline double mann_kendall_s(const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            s += (x[j] > x[i]) ? 1.0 : (x[j] < x[i] ? -1.0 : 0.0);
    return s;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// Ordinary least squares with the usual slope standard error.
inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 3) throw std::invalid_argument("least_squares: need >= 3 points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("least_squares: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.slope_stderr = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
    return fit;
}

/// Lower q-quantile of the bootstrap distribution of the mean (resampling with
/// replacement, deterministic counter-based draws).
inline double bootstrap_mean_quantile(const std::vector<double>& values, double q,
                                      std::size_t n_boot, std::uint64_t seed) {
    if (values.empty()) throw std::invalid_argument("bootstrap_mean_quantile: empty input");
    std::vector<double> means(n_boot);
    const std::size_t n = values.size();
    for (std::size_t b = 0; b < n_boot; ++b) {
        CounterStream stream(seed, b);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double u = stream.uniform(j);
            std::size_t idx = static_cast<std::size_t>(u * static_cast<double>(n));
            if (idx >= n) idx = n - 1;
            s += values[idx];
        }
        means[b] = s / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    std::size_t k = static_cast<std::size_t>(q * static_cast<double>(n_boot));
    if (k >= n_boot) k = n_boot - 1;
    return means[k];
}

}  // namespace fabric
