#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "error.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "rng.hpp"

using namespace lrmsim;

namespace {

// Fixed-step race with both drift tilts, no bridge correction.
double euler_race(double y1, double y2, double dt, std::size_t replicas, std::uint64_t seed) {
    RngStream rng(seed, 0);
    const double sd = std::sqrt(dt);
    std::size_t up = 0;
    for (std::size_t r = 0; r < replicas; ++r) {
        double b = 0.0, u = 0.0;
        for (;;) {
            b += sd * rng.normal();
            u += dt;
            if (b + u >= y2) {
                ++up;
                break;
            }
            if (b - u <= y1) break;
        }
    }
    return static_cast<double>(up) / static_cast<double>(replicas);
}

}  // namespace

TEST_CASE("race oracle: symmetric corridor gives one half") {
    const auto est = race_oracle(-1.0, 1.0, 1e-3, 20000, 5, 1);
    const double p = static_cast<double>(est.upper_first) / static_cast<double>(est.replicas);
    CHECK(std::abs(p - 0.5) < 4.0 * std::sqrt(0.25 / 20000.0));
    CHECK(est.ci.lo < 0.5);
    CHECK(est.ci.hi > 0.5);
}

TEST_CASE("race oracle: a lower barrier at the origin wins almost surely") {
    const auto est = race_oracle(-1e-4, 1.0, 1e-4, 4000, 6, 1);
    CHECK(est.upper_first < 40);
}

TEST_CASE("race oracle agrees with a fine fixed-step simulation") {
    const double y1 = -0.1, y2 = 0.05;
    const auto est = race_oracle(y1, y2, 1e-4, 40000, 7, 1);
    const double p = static_cast<double>(est.upper_first) / static_cast<double>(est.replicas);
    const double q = euler_race(y1, y2, 1e-6, 3000, 8);
    const double se = std::sqrt(p * (1 - p) / 40000.0 + q * (1 - q) / 3000.0);
    CHECK(std::abs(p - q) < 4.0 * se + 0.01);
}

TEST_CASE("race oracle preconditions and determinism") {
    CHECK_THROWS_AS(race_oracle(0.5, 1.0, 1e-3, 10, 1), Error);
    CHECK_THROWS_AS(race_oracle(-1.0, -0.5, 1e-3, 10, 1), Error);
    const auto a = race_oracle(-2.0, 1.0, 1e-3, 5000, 9, 1);
    const auto b = race_oracle(-2.0, 1.0, 1e-3, 5000, 9, 3);
    CHECK(a.upper_first == b.upper_first);
}

TEST_CASE("parallel map is independent of the thread count") {
    auto f = [](std::size_t i) {
        RngStream s(11, i);
        return s.uniform();
    };
    const auto a = parallel_map<double>(257, 1, f);
    const auto b = parallel_map<double>(257, 4, f);
    CHECK(a == b);
    CHECK(resolve_threads(0) >= 1);
    CHECK(resolve_threads(3) == 3);
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 7) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}
