#pragma once

#include <string>
#include <vector>

#include "brownian.hpp"
#include "profile.hpp"

namespace lrmsim {

struct ProfileSnapshot {
    double t = 0.0;
    std::size_t index = 0;  // path sample at which the snapshot was taken
    std::vector<double> x;
    std::vector<double> L;
};

struct LrmPath {
    double x0 = 0.0;
    bool unit_profile = false;
    std::vector<double> u, t, x;  // induced checkpoints
    std::vector<ProfileSnapshot> snapshots;
    bool short_path = false;      // horizon not reached
    std::string diagnostic;

    double position_at(double time) const;
    double u_at(double time) const;
    double t_at(double uu) const;
};

struct LrmOptions {
    double t_max = 1.0;
    std::vector<double> snapshot_times;
    double min_gap = 1e-6;  // abort when 1 - 2 Lambda falls below this
};

// y_grid lives in S0 coordinates (S0 anchored at x0).
LrmPath build_lrm(const BrownianPath& driver, const std::vector<double>& y_grid, const OccupationProfile& profile,
                  double x0, const LrmOptions& opt);
LrmPath transform_profile(const LrmPath& unit, const OccupationProfile& profile, double x0);
LrmPath rescale(const LrmPath& path, double c);

enum class RaceOutcome { HitX2First, HitX1First, Undecided };
RaceOutcome hitting_race(const LrmPath& path, double t0, double x1, double x2);

}  // namespace lrmsim
