#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "environment.hpp"
#include "error.hpp"
#include "stats.hpp"

using namespace lrmsim;

namespace {

double value_at(const DiscreteEnvironment& e, double x) {
    const long i = std::lround(std::ldexp(x, e.lattice.n));
    return e.U[static_cast<std::size_t>(i - e.lattice.i_min)];
}

}  // namespace

TEST_CASE("discrete environment moments at x = 1") {
    const auto p = OccupationProfile::constant(1.0, -0.01, 1.0);
    const int R = 100000;
    std::vector<double> u1(R);
    for (int r = 0; r < R; ++r) {
        RngStream s(1, static_cast<std::uint64_t>(r));
        const auto e = sample_discrete_env(p, 8, s);
        REQUIRE(e.U[e.lattice.origin()] == 0.0);
        u1[static_cast<std::size_t>(r)] = value_at(e, 1.0);
    }
    CHECK(std::abs(mean(u1) - 1.0) < 0.02);
    CHECK(std::abs(variance(u1) - 2.0) < 0.05);
}

TEST_CASE("continuous environment moments and left/right independence") {
    const auto p = OccupationProfile::constant(1.0, -1.0, 1.0);
    const int R = 100000;
    std::vector<double> right(R), left(R);
    for (int r = 0; r < R; ++r) {
        RngStream s(2, static_cast<std::uint64_t>(r));
        const auto e = sample_continuous_env(p, 1.0 / 64.0, s);
        REQUIRE(e.U_at(0.0) == 0.0);
        right[static_cast<std::size_t>(r)] = e.U_at(1.0);
        left[static_cast<std::size_t>(r)] = e.U_at(-1.0);
    }
    const double se_mean = std::sqrt(2.0 / R);
    CHECK(std::abs(mean(right) - 1.0) < 4.0 * se_mean);
    CHECK(std::abs(variance(right) - 2.0) < 4.0 * 2.0 * std::sqrt(2.0 / R));
    const double mr = mean(right), ml = mean(left);
    double c = 0.0;
    for (int r = 0; r < R; ++r) c += (right[static_cast<std::size_t>(r)] - mr) * (left[static_cast<std::size_t>(r)] - ml);
    const double corr = c / R / std::sqrt(variance(right) * variance(left));
    CHECK(std::abs(corr) < 4.0 / std::sqrt(R));
}

TEST_CASE("discrete environment converges in law to the continuous one") {
    const auto p = OccupationProfile::constant(1.0, -0.001, 1.0);
    const int R = 100000;
    std::vector<double> a(R), b(R);
    for (int r = 0; r < R; ++r) {
        RngStream s(3, static_cast<std::uint64_t>(r));
        a[static_cast<std::size_t>(r)] = value_at(sample_discrete_env(p, 10, s), 1.0);
        RngStream t(4, static_cast<std::uint64_t>(r));
        b[static_cast<std::size_t>(r)] = sample_continuous_env(p, 1.0 / 64.0, t).U_at(1.0);
    }
    CHECK(ks_two_sample(a, b).D < 0.02);
}

TEST_CASE("gamma environment") {
    const auto p4 = OccupationProfile::constant(1.0, -0.5, 0.5);
    std::vector<double> g;
    for (int r = 0; g.size() < 100000; ++r) {
        RngStream s(5, static_cast<std::uint64_t>(r));
        const auto e = sample_gamma_env(p4, 4, s);
        CHECK(e.U[e.lattice.origin()] == 0.0);
        for (double v : e.gamma) {
            REQUIRE(v > 0.0);
            g.push_back(v);
        }
    }
    CHECK(std::abs(mean(g) - 8.0) < 0.05);

    const auto p8 = OccupationProfile::constant(1.0, -0.01, 1.0);
    std::vector<double> sums;
    for (int r = 0; r < 20000; ++r) {
        RngStream s(6, static_cast<std::uint64_t>(r));
        const auto e = sample_gamma_env(p8, 8, s);
        double acc = 0.0;
        for (std::size_t k = e.lattice.origin(); k + 1 < e.lattice.size(); ++k) acc += 1.0 / (2.0 * e.gamma[k]);
        sums.push_back(acc);
    }
    CHECK(std::abs(mean(sums) - 1.0) < 0.02);
}

TEST_CASE("natural scale") {
    const auto unit = OccupationProfile::constant(1.0, -2.0, 2.0);
    const auto lat = make_lattice(-2.0, 2.0, 4);
    DiscreteEnvironment zero{lat, std::vector<double>(lat.size(), 0.0)};
    const auto s = natural_scale(zero, unit);
    for (double x : {-1.5, -0.3, 0.0, 0.77, 2.0}) CHECK(s(x) == doctest::Approx(x).epsilon(1e-12));

    const double c = 0.4;
    DiscreteEnvironment flat{lat, std::vector<double>(lat.size(), c)};
    const auto sc = natural_scale(flat, unit);
    for (double x : {-1.5, 0.25, 1.0}) CHECK(sc(x) == doctest::Approx(std::exp(2 * c) * x).epsilon(1e-12));

    // Continuous U = c: W = (c - |y|) / sqrt(2) on the grid.
    const auto two = OccupationProfile::constant(2.0, -2.0, 2.0);
    std::vector<double> y, W;
    for (int k = -8; k <= 8; ++k) {
        y.push_back(k / 16.0);
        W.push_back((c - std::abs(k / 16.0)) / std::numbers::sqrt2);
    }
    const ContinuousEnvironment ce(scale_s0(two, 0.0), y, W);
    const auto scc = natural_scale(ce, two);
    for (double x : {-1.5, 0.3, 2.0}) CHECK(scc(x) == doctest::Approx(std::exp(2 * c) * x / 4.0).epsilon(1e-12));

    for (int r = 0; r < 20; ++r) {
        RngStream rs(7, static_cast<std::uint64_t>(r));
        const auto bump = OccupationProfile::builtin("bump", -2.0, 2.0);
        const auto e = sample_continuous_env(bump, 1.0 / 128.0, rs);
        const auto t = natural_scale(e, bump);
        const auto d = sample_discrete_env(bump, 6, rs);
        const auto td = natural_scale(d, bump);
        CHECK(t(0.0) == 0.0);
        for (int i = 0; i < 400; ++i) {
            const double x = -2.0 + 0.01 * i;
            const double x2 = x + 0.01;
            CHECK(t(x2) > t(x));
            CHECK(td(x2) > td(x));
            CHECK(std::abs(t.invert(t(x)) - x) < 1e-10);
            CHECK(std::abs(td.invert(td(x)) - x) < 1e-10);
        }
    }
}
