#include "lrm.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "flow.hpp"

namespace lrmsim {

namespace {

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (xs.empty()) return 0.0;
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto k = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return ys[k - 1] + w * (ys[k] - ys[k - 1]);
}

ProfileSnapshot profile_snapshot(const FlowIntegrator& flow, const ScaleTable& s0, const OccupationProfile& profile,
                                 double t, std::size_t index) {
    const LocalTimeProfile lt = local_times(snapshot(flow));
    ProfileSnapshot snap;
    snap.t = t;
    snap.index = index;
    for (std::size_t i = 0; i < flow.size(); ++i) {
        const double y = flow.y()[i];
        if (y < s0.y_lo() || y > s0.y_hi()) continue;
        const double x = s0.invert(y);
        snap.x.push_back(x);
        snap.L.push_back(profile(x) / std::sqrt(1.0 - 2.0 * lt.Lambda[i]));
    }
    return snap;
}

}  // namespace

double LrmPath::position_at(double time) const { return interp(t, x, time); }
double LrmPath::u_at(double time) const { return interp(t, u, time); }
double LrmPath::t_at(double uu) const { return interp(u, t, uu); }

LrmPath build_lrm(const BrownianPath& driver, const std::vector<double>& y_grid, const OccupationProfile& profile,
                  double x0, const LrmOptions& opt) {
    require(opt.t_max > 0.0, "build_lrm: t_max must be positive");
    const ScaleTable s0 = scale_s0(profile, x0);
    FlowIntegrator flow(y_grid, y_grid, driver.values.at(0));
    LrmPath path;
    path.x0 = x0;
    path.unit_profile = profile.is_constant(1.0);
    std::vector<double> snaps = opt.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;

    auto integrand = [&](double xpos, double lam) {
        const double L0 = profile(xpos);
        return L0 * L0 * L0 * std::pow(1.0 - 2.0 * lam, -1.5);
    };
    path.u.push_back(0.0);
    path.t.push_back(0.0);
    path.x.push_back(x0);
    double g_prev = integrand(x0, 0.0);
    while (next_snap < snaps.size() && snaps[next_snap] <= 0.0) {
        path.snapshots.push_back(profile_snapshot(flow, s0, profile, 0.0, 0));
        ++next_snap;
    }
    double t = 0.0;
    bool done = false;
    try {
        for (std::size_t k = 1; k <= driver.steps(); ++k) {
            flow.step(driver.values[k], driver.du);
            const double lam = flow.lambda_at_xi();
            if (1.0 - 2.0 * lam < opt.min_gap) {
                path.diagnostic = "1 - 2 Lambda fell below the abort threshold";
                break;
            }
            const double xpos = s0.invert(flow.xi());
            const double g = integrand(xpos, lam);
            t += 0.5 * (g_prev + g) * driver.du;
            g_prev = g;
            path.u.push_back(flow.u());
            path.t.push_back(t);
            path.x.push_back(xpos);
            while (next_snap < snaps.size() && snaps[next_snap] <= t) {
                path.snapshots.push_back(profile_snapshot(flow, s0, profile, t, path.t.size() - 1));
                ++next_snap;
            }
            if (t >= opt.t_max) {
                done = true;
                break;
            }
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::RangeError) throw;
        path.diagnostic = e.what();
    }
    if (!done) {
        path.short_path = true;
        if (path.diagnostic.empty()) path.diagnostic = "driver exhausted before the t horizon";
    }
    return path;
}

LrmPath transform_profile(const LrmPath& unit, const OccupationProfile& profile, double x0) {
    require(unit.unit_profile, "transform_profile: input must be built with the unit profile");
    require(unit.x0 == 0.0, "transform_profile: input must start at 0");
    const ScaleTable s0 = scale_s0(profile, x0);
    LrmPath out;
    out.x0 = x0;
    out.unit_profile = profile.is_constant(1.0);
    out.short_path = unit.short_path;
    out.diagnostic = unit.diagnostic;
    double t = 0.0, g_prev = 0.0;
    for (std::size_t k = 0; k < unit.t.size(); ++k) {
        double xpos;
        try {
            xpos = s0.invert(unit.x[k]);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::RangeError) throw;
            out.short_path = true;
            out.diagnostic = e.what();
            break;
        }
        const double L0 = profile(xpos);
        const double g = L0 * L0 * L0;
        if (k > 0) t += 0.5 * (g_prev + g) * (unit.t[k] - unit.t[k - 1]);
        g_prev = g;
        out.u.push_back(unit.u[k]);
        out.t.push_back(t);
        out.x.push_back(xpos);
    }
    for (const ProfileSnapshot& s : unit.snapshots) {
        if (s.index >= out.t.size()) break;
        ProfileSnapshot n;
        n.t = out.t[s.index];
        n.index = s.index;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double y = s.x[i];
            if (y < s0.y_lo() || y > s0.y_hi()) continue;
            const double xx = s0.invert(y);
            n.x.push_back(xx);
            n.L.push_back(profile(xx) * s.L[i]);
        }
        out.snapshots.push_back(std::move(n));
    }
    return out;
}

LrmPath rescale(const LrmPath& path, double c) {
    require(c > 0.0 && std::isfinite(c), "rescale: c must be positive");
    LrmPath out = path;
    const double c2 = c * c, c3 = c2 * c;
    out.x0 *= c2;
    out.unit_profile = path.unit_profile && c == 1.0;
    for (double& v : out.t) v *= c3;
    for (double& v : out.x) v *= c2;
    for (ProfileSnapshot& s : out.snapshots) {
        s.t *= c3;
        for (double& v : s.x) v *= c2;
        for (double& v : s.L) v *= c;
    }
    return out;
}

RaceOutcome hitting_race(const LrmPath& path, double t0, double x1, double x2) {
    require(!path.t.empty(), "hitting_race: empty path");
    const double start = path.position_at(t0);
    require(x1 < start && start < x2, "hitting_race: requires x1 < X(t0) < x2");
    auto it = std::upper_bound(path.t.begin(), path.t.end(), t0);
    for (auto k = static_cast<std::size_t>(it - path.t.begin()); k < path.t.size(); ++k) {
        if (path.x[k] >= x2) return RaceOutcome::HitX2First;
        if (path.x[k] <= x1) return RaceOutcome::HitX1First;
    }
    return RaceOutcome::Undecided;
}

}  // namespace lrmsim
