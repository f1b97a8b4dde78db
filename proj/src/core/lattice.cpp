#include "lattice.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "samplers.hpp"

namespace lrmsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_edge(std::size_t idx, std::size_t size) { return idx == 0 || idx + 1 == size; }

DiscreteLocalTimeField make_field(const Lattice& lat, std::span<const double> L0) {
    DiscreteLocalTimeField f;
    f.lattice = lat;
    f.base.assign(L0.begin(), L0.end());
    f.occ.assign(L0.size(), 0.0);
    return f;
}

JumpTrajectory make_traj(const Lattice& lat, Clock clock) {
    JumpTrajectory tr;
    tr.n = lat.n;
    tr.clock = clock;
    tr.start_site = 0;
    return tr;
}

// Visit every sojourn of a run: f(index, start, end, next_index or -1 at the end).
template <class F>
void for_each_sojourn(const LatticeRun& run, F&& f) {
    const auto& tr = run.traj;
    const long i_min = run.field.lattice.i_min;
    auto idx = static_cast<long>(tr.start_site - i_min);
    double start = 0.0;
    for (std::size_t k = 0; k < tr.sites.size(); ++k) {
        const long next = tr.sites[k] - i_min;
        f(static_cast<std::size_t>(idx), start, tr.jump_times[k], next);
        idx = next;
        start = tr.jump_times[k];
    }
    f(static_cast<std::size_t>(idx), start, tr.end_time, -1L);
}

}  // namespace

const char* clock_name(Clock c) {
    switch (c) {
        case Clock::T: return "t";
        case Clock::Q: return "q";
        case Clock::U: return "u";
        case Clock::Step: return "k";
    }
    return "?";
}

long JumpTrajectory::site_at(double time) const {
    auto it = std::upper_bound(jump_times.begin(), jump_times.end(), time);
    if (it == jump_times.begin()) return start_site;
    return sites[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

double JumpTrajectory::position_at(double time) const { return std::ldexp(static_cast<double>(site_at(time)), -n); }

double DiscreteLocalTimeField::total_time() const {
    double s = 0.0;
    for (double v : occ) s += v;
    return std::ldexp(s, -lattice.n);
}

std::vector<double> LatticeRun::occupation_at(double time) const {
    std::vector<double> occ(field.occ.size(), 0.0);
    const double scale = std::ldexp(1.0, field.lattice.n);
    for_each_sojourn(*this, [&](std::size_t i, double a, double b, long) {
        if (a < time) occ[i] += scale * (std::min(b, time) - a);
    });
    return occ;
}

LatticeRun simulate_vrjp(const OccupationProfile& profile, int n, double t_max, RngStream& rng) {
    StopRule s;
    s.primary = t_max;
    return simulate_vrjp(profile, n, s, rng);
}

namespace {

template <class Sink>
LatticeRun vrjp_impl(const OccupationProfile& profile, int n, const StopRule& stop, RngStream& rng, Sink&& sink) {
    require(stop.primary > 0.0, "simulate_vrjp: t_max must be positive");
    require(std::isfinite(stop.primary) || std::isfinite(stop.u_max), "simulate_vrjp: no finite stopping clock");
    const Lattice lat = make_lattice(profile.lo(), profile.hi(), n);
    require(lat.contains_origin(), "simulate_vrjp: start site 0 lies outside the domain");
    const std::vector<double> L0 = lattice_restrict(profile, n);

    LatticeRun run{make_traj(lat, Clock::T), make_field(lat, L0)};
    std::vector<double> L = L0;
    const double c = std::ldexp(1.0, 2 * n - 1);
    const double scale = std::ldexp(1.0, n);
    const std::size_t size = lat.size();
    std::size_t pos = lat.origin();
    double t = 0.0, u = 0.0;

    for (;;) {
        if (is_edge(pos, size)) {
            run.traj.boundary_hit = true;
            break;
        }
        const double Lm = L[pos - 1], Lp = L[pos + 1];
        const double tau = sample_exponential(rng) / (c * (Lm + Lp));
        const double a = L[pos];
        double hold = std::min(tau, stop.primary - t);
        bool stopped = tau >= stop.primary - t;
        if (std::isfinite(stop.u_max)) {
            // du = cu dt / L(x)^2 with L(x) = a + 2^n s over the sojourn.
            const double cu = (Lm + Lp) / (2.0 * Lm * Lp);
            const double rem = stop.u_max - u;
            const double den = cu - rem * a * scale;
            if (den > 0.0) {
                const double s_u = rem * a * a / den;
                if (s_u <= hold) {
                    hold = s_u;
                    stopped = true;
                }
            }
            u += cu * hold / (a * (a + scale * hold));
        }
        L[pos] += scale * hold;
        run.field.occ[pos] += scale * hold;
        if (stopped) {
            t = std::min(t + hold, stop.primary);
            break;
        }
        t += tau;
        pos = (rng.uniform() * (Lm + Lp) < Lp) ? pos + 1 : pos - 1;
        sink(run.traj, t, lat.i_min + static_cast<long>(pos));
    }
    run.traj.end_time = t;
    return run;
}

}  // namespace

LatticeRun simulate_vrjp(const OccupationProfile& profile, int n, const StopRule& stop, RngStream& rng) {
    return vrjp_impl(profile, n, stop, rng, [](JumpTrajectory& tr, double t, long site) {
        tr.jump_times.push_back(t);
        tr.sites.push_back(site);
    });
}

LatticeRun simulate_vrjp_streaming(const OccupationProfile& profile, int n, const StopRule& stop, RngStream& rng,
                                   const std::function<void(double, long)>& on_jump) {
    return vrjp_impl(profile, n, stop, rng, [&](JumpTrajectory&, double t, long site) { on_jump(t, site); });
}

LatticeRun simulate_errw(const OccupationProfile& profile, int n, std::size_t steps, RngStream& rng) {
    const Lattice lat = make_lattice(profile.lo(), profile.hi(), n);
    require(lat.contains_origin(), "simulate_errw: start site 0 lies outside the domain");
    const std::vector<double> L0 = lattice_restrict(profile, n);
    LatticeRun run{make_traj(lat, Clock::Step), make_field(lat, L0)};
    const std::size_t size = lat.size();
    std::vector<double> w(size > 0 ? size - 1 : 0);
    const double half = std::ldexp(1.0, n - 1);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = half * L0[k] * L0[k + 1];

    std::size_t pos = lat.origin();
    std::size_t k = 0;
    for (; k < steps; ++k) {
        if (is_edge(pos, size)) {
            run.traj.boundary_hit = true;
            break;
        }
        run.field.occ[pos] += 1.0;
        const double wm = w[pos - 1], wp = w[pos];
        if (rng.uniform() * (wm + wp) < wp) {
            w[pos] += 1.0;
            ++pos;
        } else {
            w[pos - 1] += 1.0;
            --pos;
        }
        run.traj.jump_times.push_back(static_cast<double>(k + 1));
        run.traj.sites.push_back(lat.i_min + static_cast<long>(pos));
    }
    run.traj.end_time = static_cast<double>(k);
    return run;
}

LatticeRun jump_process_in_environment(const Lattice& lat, std::span<const double> L0, std::span<const double> U,
                                       const StopRule& stop, RngStream& rng) {
    const std::size_t size = lat.size();
    require(L0.size() == size && U.size() == size, "jump_process_in_environment: environment/lattice size mismatch");
    require(lat.contains_origin(), "jump_process_in_environment: start site 0 lies outside the domain");
    require(std::isfinite(stop.primary) || std::isfinite(stop.t_max) || std::isfinite(stop.u_max),
            "jump_process_in_environment: no finite stopping clock");

    LatticeRun run{make_traj(lat, Clock::Q), make_field(lat, L0)};
    const double c = std::ldexp(1.0, 2 * lat.n - 1);
    const double scale = std::ldexp(1.0, lat.n);
    const double inv_scale = 1.0 / scale;

    std::vector<double> up(size, 0.0), total(size, 0.0);
    for (std::size_t i = 1; i + 1 < size; ++i) {
        const double rp = c * (L0[i + 1] / L0[i]) * std::exp(U[i] - U[i + 1]);
        const double rm = c * (L0[i - 1] / L0[i]) * std::exp(U[i] - U[i - 1]);
        up[i] = rp;
        total[i] = rp + rm;
    }

    std::vector<double>& lam = run.field.occ;
    std::size_t pos = lat.origin();
    double q = 0.0, t = 0.0, u = 0.0;
    const bool track_t = std::isfinite(stop.t_max);
    const bool track_u = std::isfinite(stop.u_max);

    for (;;) {
        if (is_edge(pos, size)) {
            run.traj.boundary_hit = true;
            break;
        }
        const double tau = sample_exponential(rng) / total[pos];
        double hold = std::min(tau, stop.primary - q);
        bool stopped = tau >= stop.primary - q;
        const double la = lam[pos];
        if (track_t) {
            // Mixture clock: L = sqrt(L0^2 + 2 lambda) grows by 2^n dt.
            const double La = std::sqrt(L0[pos] * L0[pos] + 2.0 * la);
            const double Lt = La + scale * (stop.t_max - t);
            const double s_t = ((Lt * Lt - L0[pos] * L0[pos]) * 0.5 - la) * inv_scale;
            if (s_t <= hold) {
                hold = s_t;
                stopped = true;
            }
        }
        if (track_u) {
            const double a = 1.0 + 2.0 * la;
            const double rem = stop.u_max - u;
            const double den = 1.0 - 2.0 * scale * a * rem;
            if (den > 0.0) {
                const double s_u = rem * a * a / den;
                if (s_u <= hold) {
                    hold = s_u;
                    stopped = true;
                }
            }
        }
        hold = std::max(hold, 0.0);
        const double lb = la + scale * hold;
        if (track_t) {
            const double A = std::sqrt(L0[pos] * L0[pos] + 2.0 * la);
            const double B = std::sqrt(L0[pos] * L0[pos] + 2.0 * lb);
            t += inv_scale * 2.0 * (lb - la) / (A + B);
        }
        if (track_u) {
            const double a = 1.0 + 2.0 * la;
            u += hold / (a * (a + 2.0 * scale * hold));
        }
        lam[pos] = lb;
        if (stopped) {
            q += hold;
            break;
        }
        q += tau;
        pos = (rng.uniform() * total[pos] < up[pos]) ? pos + 1 : pos - 1;
        run.traj.jump_times.push_back(q);
        run.traj.sites.push_back(lat.i_min + static_cast<long>(pos));
    }
    run.traj.end_time = q;
    return run;
}

LatticeRun walk_in_gamma_environment(const Lattice& lat, std::span<const double> gamma, std::span<const double> U,
                                     std::size_t steps, RngStream& rng) {
    const std::size_t size = lat.size();
    require(U.size() == size && gamma.size() + 1 == size, "walk_in_gamma_environment: size mismatch");
    require(lat.contains_origin(), "walk_in_gamma_environment: start site 0 lies outside the domain");
    std::vector<double> ones(size, 1.0);
    LatticeRun run{make_traj(lat, Clock::Step), make_field(lat, ones)};
    std::vector<double> p_up(size, 0.5);
    for (std::size_t i = 1; i + 1 < size; ++i)
        p_up[i] = 1.0 / (1.0 + (gamma[i - 1] / gamma[i]) * std::exp(U[i + 1] - U[i - 1]));

    std::size_t pos = lat.origin();
    std::size_t k = 0;
    for (; k < steps; ++k) {
        if (is_edge(pos, size)) {
            run.traj.boundary_hit = true;
            break;
        }
        run.field.occ[pos] += 1.0;
        pos = (rng.uniform() < p_up[pos]) ? pos + 1 : pos - 1;
        run.traj.jump_times.push_back(static_cast<double>(k + 1));
        run.traj.sites.push_back(lat.i_min + static_cast<long>(pos));
    }
    run.traj.end_time = static_cast<double>(k);
    return run;
}

LatticeRun mixture_time_change(const LatticeRun& env_run, std::span<const double> L0) {
    require(env_run.traj.clock == Clock::Q, "mixture_time_change: input must be an environment run in q-time");
    require(L0.size() == env_run.field.lattice.size(), "mixture_time_change: profile does not match the run lattice");
    for (std::size_t i = 0; i < L0.size(); ++i)
        require(L0[i] == env_run.field.base[i], "mixture_time_change: profile does not match the run");

    const Lattice& lat = env_run.field.lattice;
    const double scale = std::ldexp(1.0, lat.n);
    const double inv_scale = 1.0 / scale;
    LatticeRun out{env_run.traj, make_field(lat, L0)};
    out.traj.clock = Clock::T;
    std::vector<double> lam(L0.size(), 0.0);
    double t = 0.0;
    std::size_t k = 0;
    for_each_sojourn(env_run, [&](std::size_t i, double qa, double qb, long next) {
        const double la = lam[i];
        const double lb = la + scale * (qb - qa);
        const double A = std::sqrt(L0[i] * L0[i] + 2.0 * la);
        const double B = std::sqrt(L0[i] * L0[i] + 2.0 * lb);
        t += inv_scale * 2.0 * (lb - la) / (A + B);
        lam[i] = lb;
        if (next >= 0) out.traj.jump_times[k++] = t;
    });
    out.traj.end_time = t;
    for (std::size_t i = 0; i < L0.size(); ++i) out.field.occ[i] = std::sqrt(L0[i] * L0[i] + 2.0 * lam[i]) - L0[i];
    return out;
}

LatticeRun reduced_time_change(const LatticeRun& env_run) {
    require(env_run.traj.clock == Clock::Q, "reduced_time_change: input must be an environment run in q-time");
    for (double b : env_run.field.base) require(b == 1.0, "reduced_time_change: requires the unit profile");
    const Lattice& lat = env_run.field.lattice;
    const double scale = std::ldexp(1.0, lat.n);
    LatticeRun out{env_run.traj, make_field(lat, env_run.field.base)};
    out.traj.clock = Clock::U;
    std::vector<double> lam(lat.size(), 0.0);
    double u = 0.0;
    std::size_t k = 0;
    for_each_sojourn(env_run, [&](std::size_t i, double qa, double qb, long next) {
        const double a = 1.0 + 2.0 * lam[i];
        const double dq = qb - qa;
        u += dq / (a * (a + 2.0 * scale * dq));
        lam[i] += scale * dq;
        if (next >= 0) out.traj.jump_times[k++] = u;
    });
    out.traj.end_time = u;
    for (std::size_t i = 0; i < lam.size(); ++i) out.field.occ[i] = lam[i] / (1.0 + 2.0 * lam[i]);
    return out;
}

double MartingaleTrace::value_at(double uu) const {
    auto it = std::upper_bound(u.begin(), u.end(), uu);
    if (it == u.begin()) return 0.0;
    return M[static_cast<std::size_t>(it - u.begin()) - 1];
}

MartingaleTrace track_martingale(const LatticeRun& run) {
    require(run.traj.clock == Clock::T, "track_martingale: input must be a VRJP run in t-time");
    const Lattice& lat = run.field.lattice;
    const double scale = std::ldexp(1.0, lat.n);
    const double h = 1.0 / scale;
    std::vector<double> L = run.field.base;
    MartingaleTrace tr;
    tr.u.reserve(run.traj.jumps());
    tr.M.reserve(run.traj.jumps());
    double u = 0.0, M = 0.0;
    for_each_sojourn(run, [&](std::size_t i, double ta, double tb, long next) {
        if (i == 0 || i + 1 == L.size()) return;  // absorbed
        const double Lm = L[i - 1], Lp = L[i + 1];
        const double a = L[i];
        const double dt = tb - ta;
        u += (Lm + Lp) / (2.0 * Lm * Lp) * dt / (a * (a + scale * dt));
        L[i] = a + scale * dt;
        if (next < 0) return;
        const auto j = static_cast<std::size_t>(next);
        const double gap = h / (L[i] * L[j]);
        M += (j > i) ? gap : -gap;
        tr.u.push_back(u);
        tr.M.push_back(M);
    });
    tr.u_end = u;
    tr.gaps.resize(L.size() - 1);
    for (std::size_t k = 0; k + 1 < L.size(); ++k) tr.gaps[k] = h / (L[k] * L[k + 1]);
    return tr;
}

}  // namespace lrmsim
