#include <doctest.h>

#include <cmath>

#include "envdiff.hpp"
#include "error.hpp"

using namespace lrmsim;

TEST_CASE("env diffusion bookkeeping and quenched reuse") {
    const auto unit = OccupationProfile::builtin("unit", -4.0, 4.0);
    StopRule stop;
    stop.primary = 1.0;
    RngStream a(21, 0), b(21, 1);
    const auto first = simulate_env_diffusion(unit, 4, stop, a);
    const auto second = simulate_env_diffusion(unit, 4, stop, b, first.env);
    CHECK(first.env_hash == second.env_hash);
    CHECK(first.run.traj.sites != second.run.traj.sites);
    RngStream c(21, 2);
    CHECK(simulate_env_diffusion(unit, 4, stop, c).env_hash != first.env_hash);
    CHECK_THROWS_AS(simulate_env_diffusion(unit, 0, stop, c), Error);

    for (double v : first.run.field.occ) CHECK(v >= 0.0);
    CHECK(std::abs(first.run.field.total_time() - first.run.traj.end_time) < 1e-9);
}

TEST_CASE("env diffusion time changes") {
    const auto unit = OccupationProfile::builtin("unit", -4.0, 4.0);
    StopRule stop;
    stop.primary = 2.0;
    RngStream s(22, 0);
    const auto run = simulate_env_diffusion(unit, 4, stop, s);

    const auto lrm = time_change_to_lrm(run);
    CHECK(lrm.traj.jump_times.size() == run.run.traj.jump_times.size());
    CHECK(std::abs(lrm.field.total_time() - lrm.traj.end_time) < 1e-9);
    for (std::size_t i = 0; i < lrm.field.occ.size(); ++i) {
        const double L0 = run.run.field.base[i], lam = run.run.field.occ[i];
        CHECK(lrm.field.occ[i] == doctest::Approx(std::sqrt(L0 * L0 + 2.0 * lam) - L0));
    }

    const auto xi = xi_representation(run);
    for (std::size_t i = 0; i < xi.field.occ.size(); ++i) {
        const double lam = run.run.field.occ[i];
        CHECK(xi.field.occ[i] >= 0.0);
        CHECK(xi.field.occ[i] < 0.5);
        CHECK(xi.field.occ[i] == doctest::Approx(lam / (1.0 + 2.0 * lam)));
    }
    CHECK(xi.traj.end_time <= run.run.traj.end_time);

    const auto bump = OccupationProfile::builtin("bump", -4.0, 4.0);
    const auto other = simulate_env_diffusion(bump, 4, stop, s);
    CHECK_THROWS_AS(xi_representation(other), Error);
}
