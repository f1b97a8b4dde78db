#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "brownian.hpp"
#include "error.hpp"
#include "flow.hpp"
#include "lrm.hpp"

using namespace lrmsim;

namespace {

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return ys.front();
    if (it == xs.end()) return ys.back();
    const auto k = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return ys[k - 1] + w * (ys[k] - ys[k - 1]);
}

}  // namespace

TEST_CASE("lrm at time zero and the unit time change") {
    RngStream s(11, 0);
    const auto drv = brownian_path(1e-3, 2.0, s);
    const auto y = uniform_grid(6.0, 601);
    LrmOptions opt;
    opt.t_max = 1.0;
    opt.snapshot_times = {0.0, 0.5, 1.0};
    const auto path = build_lrm(drv, y, OccupationProfile::builtin("unit", -8.0, 8.0), 0.0, opt);
    CHECK(path.x.front() == 0.0);
    CHECK(path.t.front() == 0.0);
    REQUIRE(path.snapshots.size() == 3);
    for (double L : path.snapshots[0].L) CHECK(L == 1.0);
    for (std::size_t k = 0; k < path.t.size(); ++k) CHECK(path.t[k] >= path.u[k] - 1e-15);
    for (std::size_t k = 1; k < path.t.size(); ++k) CHECK(path.t[k] > path.t[k - 1]);
    for (std::size_t j = 1; j < path.snapshots.size(); ++j)
        for (std::size_t i = 0; i < path.snapshots[j].L.size(); ++i) {
            CHECK(path.snapshots[j].L[i] >= 1.0);
            CHECK(path.snapshots[j].L[i] >= path.snapshots[j - 1].L[i] - 1e-12);
        }
    for (double tt : {0.1, 0.37, 0.9}) CHECK(std::abs(path.t_at(path.u_at(tt)) - tt) < 1e-9);
}

TEST_CASE("lrm time change agrees with the a-posteriori form") {
    RngStream s(12, 0);
    const auto drv = brownian_path(1e-4, 0.5, s);
    const auto y = uniform_grid(3.0, 601);
    FlowRunOptions fo;
    fo.checkpoint_every = 1;
    const auto run = flow_run(drv, y, 0.5, fo);
    LrmOptions opt;
    opt.t_max = 1e9;
    const auto path = build_lrm(drv, y, OccupationProfile::builtin("unit", -8.0, 8.0), 0.0, opt);
    // L_t(X_t) = exp(Lcal(xi)) interpolated from the checkpoint local times.
    double t = 0.0, prev = 1.0;
    const std::size_t last = std::min(run.checkpoints.size(), path.t.size()) - 1;
    for (std::size_t k = 1; k <= last; ++k) {
        const auto lt = local_times(run.checkpoints[k]);
        const double L = std::exp(interp(run.checkpoints[k].y, lt.Lcal, run.xi[k]));
        const double g = L * L * L;
        t += 0.5 * (prev + g) * drv.du;
        prev = g;
    }
    CHECK(std::abs(t / path.t[last] - 1.0) < 0.01);
}

TEST_CASE("lrm occupation density identity on test intervals") {
    RngStream s(13, 0);
    const auto drv = brownian_path(1e-4, 3.0, s);
    const auto y = uniform_grid(5.0, 2001);
    LrmOptions opt;
    opt.t_max = 1.0;
    opt.snapshot_times = {1.0};
    const auto path = build_lrm(drv, y, OccupationProfile::builtin("unit", -8.0, 8.0), 0.0, opt);
    REQUIRE_FALSE(path.short_path);
    REQUIRE(path.snapshots.size() == 1);
    const auto& snap = path.snapshots[0];
    const double T = path.t[snap.index];
    for (auto [a, b] : {std::pair{-0.4, 0.0}, std::pair{0.0, 0.4}, std::pair{-5.0, 5.0}}) {
        CAPTURE(a);
        // Time spent in [a, b] along the piecewise-linear path.
        double occ_time = 0.0;
        for (std::size_t k = 1; k <= snap.index; ++k) {
            const double x0 = path.x[k - 1], x1 = path.x[k], dt = path.t[k] - path.t[k - 1];
            if (x0 == x1) {
                if (x0 >= a && x0 <= b) occ_time += dt;
                continue;
            }
            const double lo = std::max(a, std::min(x0, x1)), hi = std::min(b, std::max(x0, x1));
            if (hi > lo) occ_time += dt * (hi - lo) / std::abs(x1 - x0);
        }
        double mass = 0.0;
        for (std::size_t i = 1; i < snap.x.size(); ++i) {
            const double lo = std::max(a, snap.x[i - 1]), hi = std::min(b, snap.x[i]);
            if (hi <= lo) continue;
            const double w = snap.x[i] - snap.x[i - 1];
            const double f0 = snap.L[i - 1] - 1.0, f1 = snap.L[i] - 1.0;
            const double g0 = f0 + (f1 - f0) * (lo - snap.x[i - 1]) / w;
            const double g1 = f0 + (f1 - f0) * (hi - snap.x[i - 1]) / w;
            mass += 0.5 * (g0 + g1) * (hi - lo);
        }
        if (occ_time > 0.05 * T) CHECK(std::abs(mass / occ_time - 1.0) < 0.02);
    }
}

TEST_CASE("lrm profile transforms and rescaling") {
    RngStream s(14, 0);
    const auto drv = brownian_path(1e-3, 2.0, s);
    const auto y = uniform_grid(6.0, 601);
    LrmOptions opt;
    opt.snapshot_times = {0.5};
    const auto unit = build_lrm(drv, y, OccupationProfile::builtin("unit", -8.0, 8.0), 0.0, opt);

    const auto same = transform_profile(unit, OccupationProfile::builtin("unit", -8.0, 8.0), 0.0);
    REQUIRE(same.t.size() == unit.t.size());
    for (std::size_t k = 0; k < unit.t.size(); ++k) {
        CHECK(std::abs(same.x[k] - unit.x[k]) < 1e-12);
        CHECK(std::abs(same.t[k] - unit.t[k]) < 1e-12);
    }

    const auto two = rescale(unit, 2.0);
    for (std::size_t k = 0; k < unit.t.size(); ++k) {
        CHECK(two.t[k] == doctest::Approx(8.0 * unit.t[k]).epsilon(1e-14));
        CHECK(two.x[k] == doctest::Approx(4.0 * unit.x[k]).epsilon(1e-14));
    }
    CHECK(two.snapshots[0].L[0] == doctest::Approx(2.0 * unit.snapshots[0].L[0]));
    const auto one = rescale(unit, 1.0);
    CHECK(one.x == unit.x);
    CHECK_THROWS_AS(rescale(unit, 0.0), Error);
    CHECK_THROWS_AS(rescale(unit, -1.0), Error);

    const auto c2 = transform_profile(unit, OccupationProfile::constant(2.0, -40.0, 40.0), 0.0);
    for (std::size_t k = 0; k < c2.t.size(); ++k) {
        CHECK(std::abs(c2.x[k] - two.x[k]) < 1e-9);
        CHECK(std::abs(c2.t[k] - two.t[k]) < 1e-9 * std::max(1.0, two.t[k]));
    }
    CHECK_THROWS_AS(transform_profile(two, OccupationProfile::builtin("unit", -8.0, 8.0), 0.0), Error);
}

TEST_CASE("lrm flags short paths and checks race preconditions") {
    RngStream s(15, 0);
    const auto drv = brownian_path(1e-3, 0.05, s);
    const auto y = uniform_grid(3.0, 301);
    LrmOptions opt;
    opt.t_max = 10.0;
    const auto path = build_lrm(drv, y, OccupationProfile::builtin("unit", -8.0, 8.0), 0.0, opt);
    CHECK(path.short_path);
    CHECK_FALSE(path.diagnostic.empty());
    CHECK_THROWS_AS(hitting_race(path, 0.0, 0.0, 1.0), Error);
    CHECK_THROWS_AS(hitting_race(path, 0.0, -1.0, -0.5), Error);
    CHECK(hitting_race(path, 0.0, -5.0, 5.0) == RaceOutcome::Undecided);
}
