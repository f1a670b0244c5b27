#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fabric/stochastic.hpp"
#include "oracles.hpp"

using namespace fabric;

TEST_CASE("philox reproduces the published known-answer vectors", "[stochastic][rng]") {
    auto r0 = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    CHECK(r0 == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    auto r1 = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                {0xffffffffu, 0xffffffffu});
    CHECK(r1 == Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    auto r2 = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                {0xa4093822u, 0x299f31d0u});
    CHECK(r2 == Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter streams are indexed, reproducible and in (0,1]", "[stochastic][rng]") {
    CounterStream a(42, 7);
    CounterStream b(42, 7);
    CounterStream c(42, 8);
    for (std::uint64_t i = 0; i < 100; ++i) {
        const double u = a.uniform(i);
        CHECK(u == b.uniform(i));
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
        CHECK(a.uniform(i) != c.uniform(i));
    }
    // normal pair has the right first moments at scale
    std::vector<double> z;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        auto [z0, z1] = a.normal_pair(i);
        z.push_back(z0);
        z.push_back(z1);
    }
    auto mv = mean_variance(z);
    CHECK(std::fabs(mv.mean) < 4.0 * mv.sem());
    CHECK(mv.var == Catch::Approx(1.0).margin(0.02));
}

TEST_CASE("stretched-gaussian sampler matches the normal law in the identity fabric",
          "[stochastic]") {
    StretchedGaussian g(FractalIndices(1.0, 1.0), 1.0);
    const std::size_t n = 100000;
    auto xs = sample_stretched_gaussian(g, 1.0, n, 1234);
    const double sd = std::sqrt(2.0);  // variance 2 D t
    const double d = ks_statistic(xs, [&](double x) { return 0.5 * std::erfc(-x / (sd * std::sqrt(2.0))); });
    CHECK(d < ks_critical(n, 0.01));
    CHECK_THROWS_AS(sample_stretched_gaussian(g, 0.0, 10, 1), std::domain_error);
}

TEST_CASE("stretched-gaussian sampler passes a chi-square test against the density",
          "[stochastic]") {
    // beta = 1/2: x = sign(y) y^2, heavily peaked at the origin
    StretchedGaussian g(FractalIndices(0.8, 0.5), 1.0);
    const double t = 1.0;
    const std::size_t n = 1000000;
    auto xs = sample_stretched_gaussian(g, t, n, 99);

    // equal-probability bins from the closed-form quantiles
    const int bins = 64;
    const double sd = std::sqrt(g.hat_variance(t));
    std::vector<double> edges(bins + 1);
    edges[0] = -std::numeric_limits<double>::infinity();
    edges[bins] = std::numeric_limits<double>::infinity();
    for (int j = 1; j < bins; ++j)
        edges[j] = unhat_space(sd * normal_quantile(static_cast<double>(j) / bins), g.beta());
    std::vector<std::size_t> counts(bins, 0);
    for (double x : xs) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), x);
        ++counts[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
    std::vector<double> probs(bins, 1.0 / bins);
    const double chi2 = chi2_statistic(counts, probs, n);
    CHECK(chi2 < chi2_quantile(bins - 1, 0.99));
}

TEST_CASE("sampler moment identity <|x|^{2beta}> = 2 D t^alpha", "[stochastic]") {
    StretchedGaussian g(FractalIndices(0.8, 2.0 / 3.0), 1.0);
    const double t = 2.0;
    const std::size_t n = 1000000;
    auto xs = sample_stretched_gaussian(g, t, n, 2024);
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = std::pow(std::fabs(xs[i]), 2.0 * g.beta());
    auto mv = mean_variance(m);
    const double expect = moment_2beta(g, t);  // 2 * 2^{0.8}
    CHECK(std::fabs(mv.mean - expect) < 3.0 * mv.sem());
    CHECK(mv.mean == Catch::Approx(expect).epsilon(0.01));
}

TEST_CASE("walk ensemble is deterministic and thread-count independent", "[stochastic]") {
    FractalIndices idx(1.0, 2.0 / 3.0);
    std::vector<double> schedule{0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
    auto r1 = walk_ensemble(idx, 1.0, schedule, 4096, 7, 1);
    auto r2 = walk_ensemble(idx, 1.0, schedule, 4096, 7, 4);
    REQUIRE(r1.series.msd.size() == r2.series.msd.size());
    for (std::size_t j = 0; j < r1.series.msd.size(); ++j) {
        CHECK(r1.series.msd[j] == r2.series.msd[j]);          // bitwise
        CHECK(r1.series.m2beta[j] == r2.series.m2beta[j]);    // bitwise
    }
    for (std::size_t w = 0; w < r1.final_state.positions.size(); ++w)
        CHECK(r1.final_state.positions[w] == r2.final_state.positions[w]);

    // single walker, fixed seed: bitwise-reproducible trajectory
    auto s1 = walk_ensemble(idx, 1.0, schedule, 1, 5, 1);
    auto s2 = walk_ensemble(idx, 1.0, schedule, 1, 5, 1);
    CHECK(s1.final_state.positions[0] == s2.final_state.positions[0]);
}

TEST_CASE("walk ensemble transformed moment tracks 2 D t^alpha", "[stochastic]") {
    FractalIndices idx(0.7, 0.8);
    const double D = 1.3;
    std::vector<double> schedule{0.2, 0.5, 1.0, 2.0, 4.0};
    auto r = walk_ensemble(idx, D, schedule, 60000, 11, 2);
    for (std::size_t j = 0; j < schedule.size(); ++j) {
        const double expect = 2.0 * D * hat_time(schedule[j], idx.alpha());
        CHECK(std::fabs(r.series.m2beta[j] - expect) < 3.5 * r.series.m2beta_sem[j]);
    }
}

TEST_CASE("brownian limit: <x^2> = 2 D t within Monte Carlo error", "[stochastic]") {
    FractalIndices idx(1.0, 1.0);
    std::vector<double> schedule{0.5, 1.0, 2.0, 4.0};
    auto r = walk_ensemble(idx, 0.5, schedule, 50000, 3, 2);
    for (std::size_t j = 0; j < schedule.size(); ++j)
        CHECK(std::fabs(r.series.msd[j] - schedule[j]) < 3.0 * r.series.msd_sem[j]);
}

namespace {

MsdFit fit_eta(double alpha, double beta, std::size_t n, std::uint64_t seed) {
    FractalIndices idx(alpha, beta);
    std::vector<double> schedule;
    for (int j = 0; j < 12; ++j) schedule.push_back(0.1 * std::pow(10.0, 2.0 * j / 11.0));
    auto r = walk_ensemble(idx, 1.0, schedule, n, seed, 2);
    return estimate_msd_exponent(r.series);
}

}  // namespace

TEST_CASE("msd exponent recovery across the three reference fabrics", "[stochastic]") {
    // oracle: <x^2> = (2 D t^alpha)^{1/beta} E|N|^{2/beta}, a pure power law
    // with exponent alpha/beta; the fit must land within +-0.05 (and 3 sigma)
    struct Case {
        double alpha, beta, eta;
    };
    for (auto c : {Case{1.0, 1.0, 1.0}, Case{1.0, 2.0 / 3.0, 1.5}, Case{0.5, 1.0, 0.5}}) {
        auto fit = fit_eta(c.alpha, c.beta, 100000, 17);
        INFO("alpha=" << c.alpha << " beta=" << c.beta << " eta_hat=" << fit.eta_hat);
        CHECK(std::fabs(fit.eta_hat - c.eta) <= 0.05);
        CHECK(std::fabs(fit.eta_hat - c.eta) <= 3.0 * std::max(fit.stderr_slope, 1e-3));
    }
}

TEST_CASE("msd fit input validation", "[stochastic]") {
    FractalIndices idx(1.0, 1.0);
    std::vector<double> shorts{0.1, 0.2, 0.4, 1.0, 2.0, 4.0};  // 6 points
    auto r = walk_ensemble(idx, 1.0, shorts, 256, 1, 1);
    CHECK_THROWS_AS(estimate_msd_exponent(r.series), std::invalid_argument);
    std::vector<double> narrow{1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8};  // < 1.5 decades
    auto r2 = walk_ensemble(idx, 1.0, narrow, 256, 1, 1);
    CHECK_THROWS_AS(estimate_msd_exponent(r2.series), std::invalid_argument);
}

TEST_CASE("levy sampler: Cauchy case has the right quartiles", "[stochastic]") {
    const std::size_t n = 1000000;
    auto xs = sample_levy(1.0, n, 4242);
    std::sort(xs.begin(), xs.end());
    const double q25 = xs[n / 4];
    const double q75 = xs[3 * n / 4];
    const double median = xs[n / 2];
    CHECK(std::fabs(median) < 0.01);
    // IQR of the standard Cauchy is 2 tan(pi/4) = 2
    CHECK((q75 - q25) == Catch::Approx(2.0).epsilon(0.02));
}

TEST_CASE("levy sampler: empirical characteristic function matches exp(-|k|^a)",
          "[stochastic]") {
    for (double a : {0.75, 1.5, 1.99}) {
        const std::size_t n = 200000;
        auto xs = sample_levy(a, n, 5150);
        for (double k : {0.25, 0.5, 1.0, 2.0, 3.0}) {
            std::vector<double> c(n);
            for (std::size_t i = 0; i < n; ++i) c[i] = std::cos(k * xs[i]);
            auto mv = mean_variance(c);
            INFO("a=" << a << " k=" << k);
            CHECK(std::fabs(mv.mean - std::exp(-std::pow(k, a))) <
                  std::max(5.0 * mv.sem(), 1e-3));
        }
    }
}

TEST_CASE("levy sampler near the Gaussian edge has finite bulk variance", "[stochastic]") {
    auto xs = sample_levy(1.99, 200000, 8);
    std::sort(xs.begin(), xs.end());
    // trim 0.1% tails; the bulk should look nearly Gaussian (variance ~ 2/|cos(pi a/2)|-ish scale, finite)
    std::vector<double> bulk(xs.begin() + 200, xs.end() - 200);
    auto mv = mean_variance(bulk);
    CHECK(std::isfinite(mv.var));
    CHECK(mv.var > 0.5);
    CHECK(mv.var < 10.0);
}

TEST_CASE("levy sampler domain errors and reproducibility", "[stochastic]") {
    CHECK_THROWS_AS(sample_levy(2.0, 10, 1), std::domain_error);
    CHECK_THROWS_AS(sample_levy(0.0, 10, 1), std::domain_error);
    CHECK_THROWS_AS(sample_levy(-0.5, 10, 1), std::domain_error);
    auto a = sample_levy(1.5, 1000, 77);
    auto b = sample_levy(1.5, 1000, 77);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("diverging moment demo: 2nd moment grows, 1st stabilizes at stability 1.5",
          "[stochastic][slow]") {
    std::vector<std::size_t> sizes{1000, 3162, 10000, 31623, 100000};
    auto diverging = diverging_moment_demo(1.5, 2.0, sizes, 20, 1337, 4);
    CHECK(diverging.increasing_at_99());
    auto converging = diverging_moment_demo(1.5, 1.0, sizes, 20, 1337, 4);
    CHECK(converging.stabilized(0.05));
    CHECK_THROWS_AS(diverging_moment_demo(2.0, 2.0, sizes, 20, 1, 1), std::domain_error);
}

TEST_CASE("stats helpers: quantiles, chi2, kendall, pairwise", "[stochastic][stats]") {
    CHECK(normal_quantile(0.5) == Catch::Approx(0.0).margin(1e-9));
    CHECK(normal_quantile(0.975) == Catch::Approx(1.959963985).margin(1e-6));
    CHECK(normal_quantile(0.99) == Catch::Approx(2.326347874).margin(1e-6));
    // chi-square 99% quantile at 63 dof is ~92.0 (Wilson-Hilferty)
    CHECK(chi2_quantile(63, 0.99) == Catch::Approx(92.01).margin(0.5));

    std::vector<double> inc{1.0, 2.0, 3.0, 4.0};
    CHECK(mann_kendall_s(inc) == 6.0);
    std::vector<double> dec{4.0, 3.0, 2.0, 1.0};
    CHECK(mann_kendall_s(dec) == -6.0);

    std::vector<double> ones(1000, 1.0);
    CHECK(pairwise_sum(ones) == 1000.0);

    std::vector<double> xs{1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> ys{2.1, 3.9, 6.1, 8.0, 9.9};
    auto fit = least_squares(xs, ys);
    CHECK(fit.slope == Catch::Approx(1.97).margin(0.05));
    CHECK(fit.slope_stderr < 0.05);
}
