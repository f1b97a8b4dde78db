#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "brownian.hpp"
#include "error.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "samplers.hpp"
#include "stats.hpp"

using namespace lrmsim;

TEST_CASE("philox known-answer vectors") {
    auto z = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(z[0] == 0x6627e8d5u);
    CHECK(z[1] == 0xe169c58du);
    CHECK(z[2] == 0xbc57ac4cu);
    CHECK(z[3] == 0x9b00dbd8u);
    auto p = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    CHECK(p[0] == 0xd16cfe09u);
    CHECK(p[1] == 0x94fdccebu);
    CHECK(p[2] == 0x5001e420u);
    CHECK(p[3] == 0x24126ea1u);
}

TEST_CASE("streams are reproducible and addressable") {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        if (x != c.next_u64()) differs = true;
    }
    CHECK(differs);
    // Distinct streams are uncorrelated.
    RngStream s1(1, 0), s2(1, 1);
    const int N = 200000;
    double sxy = 0.0;
    for (int i = 0; i < N; ++i) sxy += (s1.uniform() - 0.5) * (s2.uniform() - 0.5);
    const double corr = sxy / N * 12.0;
    CHECK(std::abs(corr) < 4.0 / std::sqrt(N));
}

TEST_CASE("uniforms stay inside the open unit interval") {
    RngStream r(3, 3);
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("brownian_path grid and increments") {
    RngStream r(5, 0);
    const auto p = brownian_path(1.0, 3.0, r);
    CHECK(p.values.size() == 4);
    CHECK(p.values[0] == 0.0);
    CHECK_THROWS_AS(brownian_path(0.0, 1.0, r), Error);
    CHECK_THROWS_AS(brownian_path(0.1, -1.0, r), Error);

    RngStream r2(5, 1);
    const double du = 1e-3;
    const auto q = brownian_path(du, 1000.0, r2);  // 10^6 increments
    std::vector<double> inc(q.steps());
    for (std::size_t k = 0; k < inc.size(); ++k) inc[k] = q.values[k + 1] - q.values[k];
    const double v = variance(inc);
    CHECK(v / du == doctest::Approx(1.0).epsilon(0.01));
    // Fourth moment: E[X^4] = 3 du^2; relative standard error sqrt(96/N)/3.
    double m4 = 0.0, m3 = 0.0;
    for (double x : inc) {
        m3 += x * x * x;
        m4 += x * x * x * x;
    }
    m3 /= static_cast<double>(inc.size());
    m4 /= static_cast<double>(inc.size());
    const double n = static_cast<double>(inc.size());
    CHECK(std::abs(m3) / std::pow(du, 1.5) < 4.0 * std::sqrt(15.0 / n));
    CHECK(std::abs(m4 / (du * du) - 3.0) < 4.0 * std::sqrt(96.0 / n));

    RngStream a(9, 2), b(9, 2);
    CHECK(brownian_path(0.01, 1.0, a).values == brownian_path(0.01, 1.0, b).values);
}

TEST_CASE("refine_path pins the coarse grid and has bridge variance du/4") {
    RngStream r(11, 0);
    const auto p = brownian_path(0.25, 2.0, r);
    RngStream r1(11, 1);
    CHECK(refine_path(p, 1, r1).values == p.values);
    CHECK_THROWS_AS(refine_path(p, 3, r1), Error);
    const auto f = refine_path(p, 4, r1);
    REQUIRE(f.values.size() == 4 * p.steps() + 1);
    for (std::size_t k = 0; k <= p.steps(); ++k) CHECK(f.values[4 * k] == p.values[k]);

    // Conditional variance of the bridge midpoint is s (du - s) / du = du/4 at s = du/2.
    const double du = 0.5;
    RngStream rb(11, 2);
    std::vector<double> dev;
    dev.reserve(1000000);
    for (int rep = 0; rep < 10000; ++rep) {
        const auto c = brownian_path(du, 50.0, rb);
        const auto g = refine_path(c, 2, rb);
        for (std::size_t k = 0; k < c.steps(); ++k)
            dev.push_back(g.values[2 * k + 1] - 0.5 * (c.values[k] + c.values[k + 1]));
    }
    CHECK(variance(dev) / (du / 4.0) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("gamma sampler moments") {
    RngStream r(21, 0);
    std::vector<double> g(1000000);
    for (double& x : g) x = sample_gamma(4.0, r);
    CHECK(std::abs(mean(g) - 4.0) < 0.01);
    CHECK(std::abs(variance(g) - 4.0) < 0.05);
    for (double& x : g) x = sample_gamma(0.5, r);
    CHECK(std::abs(mean(g) - 0.5) < 0.005);
    CHECK_THROWS_AS(sample_gamma(0.0, r), Error);
}

TEST_CASE("inverse Gaussian sampler moments") {
    RngStream r(22, 0);
    std::vector<double> g(1000000);
    for (double& x : g) x = sample_inverse_gaussian(1.0, 4.0, r);
    CHECK(std::abs(mean(g) - 1.0) < 0.01);
    CHECK(std::abs(variance(g) - 0.25) < 0.02);
    for (double& x : g) x = sample_inverse_gaussian(2.0, 3.0, r);
    CHECK(std::abs(mean(g) - 2.0) < 0.02);
    CHECK(std::abs(variance(g) - 8.0 / 3.0) < 0.1);
    CHECK_THROWS_AS(sample_inverse_gaussian(0.0, 1.0, r), Error);
    CHECK_THROWS_AS(sample_inverse_gaussian(1.0, -1.0, r), Error);
    RngStream a(1, 1), b(1, 1);
    CHECK(sample_inverse_gaussian(1.0, 2.0, a) == sample_inverse_gaussian(1.0, 2.0, b));
}

namespace {

// Support of the sinh density, found by walking out until it is negligible.
double sinh_support(double K, double sign) {
    double v = 0.0, step = 0.01 / std::sqrt(K);
    while (sinh_v_density(sign * v, K) > 1e-14) v += step;
    return sign * v;
}

}  // namespace

TEST_CASE("sinh density is normalized and its draws pass chi-square") {
    for (double K : {1.0, 16.0, 1024.0}) {
        CAPTURE(K);
        const double a = sinh_support(K, -1.0), b = sinh_support(K, 1.0);
        const double total = testing_oracle::integrate([K](double v) { return sinh_v_density(v, K); }, a, b, 1e-13);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-8));

        RngStream r(31, static_cast<std::uint64_t>(K));
        const int N = 1000000, bins = 60;
        std::vector<double> counts(bins, 0.0);
        const double w = (b - a) / bins;
        for (int i = 0; i < N; ++i) {
            const double v = sample_sinh_v(K, r);
            const int k = std::clamp(static_cast<int>((v - a) / w), 0, bins - 1);
            counts[static_cast<std::size_t>(k)] += 1.0;
        }
        // Pool tail bins until each expected count is at least 5.
        double chi2 = 0.0, exp_acc = 0.0, obs_acc = 0.0;
        int dof = -1;
        for (int k = 0; k < bins; ++k) {
            const double lo = a + k * w;
            exp_acc += N * testing_oracle::integrate([K](double v) { return sinh_v_density(v, K); }, lo, lo + w, 1e-12);
            obs_acc += counts[static_cast<std::size_t>(k)];
            if (exp_acc >= 5.0 || k == bins - 1) {
                chi2 += (obs_acc - exp_acc) * (obs_acc - exp_acc) / std::max(exp_acc, 1e-300);
                ++dof;
                exp_acc = obs_acc = 0.0;
            }
        }
        CHECK(chi_square_sf(chi2, dof) > 0.001);
    }
}

TEST_CASE("sinh draws: mean and variance against the exact integrals") {
    const double K = 1024.0;
    const double a = sinh_support(K, -1.0), b = sinh_support(K, 1.0);
    const double m1 = testing_oracle::integrate([K](double v) { return v * sinh_v_density(v, K); }, a, b, 1e-15);
    const double m2 = testing_oracle::integrate([K](double v) { return v * v * sinh_v_density(v, K); }, a, b, 1e-15);
    // The mean and variance are 1/K and 2/K up to O(1/K^2).
    CHECK(K * m1 == doctest::Approx(1.0).epsilon(0.01));
    CHECK(K * (m2 - m1 * m1) / 2.0 == doctest::Approx(1.0).epsilon(0.01));

    RngStream r(41, 0);
    const int N = 1000000;
    std::vector<double> v(N), cv(N);
    for (int i = 0; i < N; ++i) {
        v[i] = sample_sinh_v(K, r);
        cv[i] = v[i] + std::exp(-v[i]) - 1.0;  // E[exp(-V)] = 1 exactly
    }
    const double se_plain = std::sqrt(variance(v) / N);
    CHECK(std::abs(mean(v) - m1) < 4.0 * se_plain);
    const double se_cv = std::sqrt(variance(cv) / N);
    CHECK(std::abs(mean(cv) - m1) < 4.0 * se_cv);
    CHECK(std::abs(K * mean(cv) - 1.0) < 0.02);
    CHECK(std::abs(K * variance(v) / 2.0 - 1.0) < 0.05);
    CHECK_THROWS_AS(sample_sinh_v(0.0, r), Error);
}
