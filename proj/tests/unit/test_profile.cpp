#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

using namespace lrmsim;

TEST_CASE("lattice restriction") {
    const auto c = OccupationProfile::constant(1.0, -2.0, 2.0);
    const auto v = lattice_restrict(c, 0);
    REQUIRE(v.size() == 5);
    for (double x : v) CHECK(x == 1.0);

    const auto p = OccupationProfile::piecewise_linear({{-1.0, 1.0}, {1.0, 3.0}}, -1.0, 1.0);
    const auto w = lattice_restrict(p, 1);
    REQUIRE(w.size() == 5);
    CHECK(w[2] == doctest::Approx(2.0));

    const auto off = OccupationProfile::constant(1.0, 3.2, 3.8);
    CHECK_THROWS_AS(lattice_restrict(off, 0), Error);
}

TEST_CASE("profile validation and JSON") {
    CHECK_THROWS_AS(OccupationProfile::constant(0.0, -1.0, 1.0), Error);
    CHECK_THROWS_AS(OccupationProfile::piecewise_linear({{0.0, 1.0}, {1.0, -1.0}}, 0.0, 1.0), Error);
    CHECK_THROWS_AS(OccupationProfile::piecewise_linear({{0.0, 1.0}, {0.0, 2.0}}, 0.0, 1.0), Error);
    CHECK_THROWS_AS(OccupationProfile::builtin("spike", -1.0, 1.0), Error);
    const auto p = OccupationProfile::from_json(R"({"kind":"pwl","knots":[[-1,1],[1,3]],"domain":[-2,2]})");
    CHECK(p(0.0) == doctest::Approx(2.0));
    CHECK(p(-2.0) == 1.0);  // constant extension
    const auto q = OccupationProfile::from_json(p.to_json());
    CHECK(q.hash() == p.hash());
    const auto c = OccupationProfile::from_json(R"({"kind":"constant","c":2.0,"domain":[-8,8]})");
    CHECK(c.is_constant(2.0));
    CHECK_THROWS_AS(OccupationProfile::from_json(R"({"c":2.0})"), Error);
    CHECK_THROWS_AS(OccupationProfile::from_json("not json"), Error);
}

TEST_CASE("scale S0 closed forms") {
    const auto unit = OccupationProfile::constant(1.0, -8.0, 8.0);
    const auto s1 = scale_s0(unit, 0.0);
    CHECK(s1(0.7) == doctest::Approx(0.7));
    CHECK(s1.invert(0.5) == doctest::Approx(0.5));

    const auto two = OccupationProfile::constant(2.0, -8.0, 8.0);
    const auto s2 = scale_s0(two, 0.0);
    CHECK(s2(1.0) == doctest::Approx(0.25));
    CHECK(s2.invert(0.25) == doctest::Approx(1.0));

    const auto lin = OccupationProfile::piecewise_linear({{0.0, 1.0}, {1.0, 2.0}}, 0.0, 1.0);
    const auto s3 = scale_s0(lin, 0.0);
    CHECK(s3(1.0) == doctest::Approx(0.5).epsilon(1e-14));
    const double quad = testing_oracle::integrate([](double r) { return 1.0 / ((1 + r) * (1 + r)); }, 0.0, 1.0);
    CHECK(s3(1.0) == doctest::Approx(quad).epsilon(1e-12));

    CHECK_THROWS_AS(scale_s0(unit, 9.0), Error);
    try {
        (void)s1.invert(100.0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RangeError);
    }
}

TEST_CASE("scale tables agree with quadrature on every built-in and round-trip") {
    for (const char* name : {"unit", "bump", "ramp"}) {
        CAPTURE(name);
        const auto p = OccupationProfile::builtin(name, -4.0, 4.0);
        CHECK(p.non_explosion_verified());
        const auto s = scale_s0(p, 0.0);
        for (double x : {-3.9, -1.3, -0.2, 0.4, 0.99, 2.5, 4.0}) {
            // Integrate piece by piece so the kinks of the knot table do not limit accuracy.
            double q = 0.0;
            const double a = std::min(0.0, x), b = std::max(0.0, x);
            double left = a;
            for (const auto& k : p.knots()) {
                if (k.x <= left || k.x >= b) continue;
                q += testing_oracle::integrate([&](double r) { return 1.0 / (p(r) * p(r)); }, left, k.x, 1e-14);
                left = k.x;
            }
            q += testing_oracle::integrate([&](double r) { return 1.0 / (p(r) * p(r)); }, left, b, 1e-14);
            if (x < 0) q = -q;
            CHECK(std::abs(s(x) - q) < 1e-9);
        }
        RngStream r(3, 0);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double x = -4.0 + 8.0 * r.uniform();
            worst = std::max(worst, std::abs(s.invert(s(x)) - x) / std::max(1.0, std::abs(x)));
        }
        CHECK(worst < 1e-12);
        // Strictly increasing.
        double prev = -1e300;
        for (int i = 0; i <= 800; ++i) {
            const double v = s(-4.0 + 0.01 * i);
            CHECK(v > prev);
            prev = v;
        }
    }
    CHECK_FALSE(OccupationProfile::piecewise_linear({{0.0, 1.0}, {1.0, 2.0}}, -1.0, 1.0).non_explosion_verified());
}
