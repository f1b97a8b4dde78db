#include "suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "brownian.hpp"
#include "envdiff.hpp"
#include "environment.hpp"
#include "error.hpp"
#include "flow.hpp"
#include "lattice.hpp"
#include "lrm.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "profile.hpp"
#include "samplers.hpp"
#include "stats.hpp"

namespace lrmsim {

using json = nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Ctx {
    json p;
    std::uint64_t seed;
    unsigned threads;
    TestReport& report;

    double num(const char* k) const { return p.at(k).get<double>(); }
    std::size_t count(const char* k) const { return p.at(k).get<std::size_t>(); }
    int integer(const char* k) const { return p.at(k).get<int>(); }
    OccupationProfile unit(const char* k) const {
        const auto& d = p.at(k);
        return OccupationProfile::constant(1.0, d.at(0).get<double>(), d.at(1).get<double>());
    }
    // Replica r of arm `arm`.
    RngStream stream(std::size_t r, std::uint64_t arm) const { return RngStream(seed, r).split(arm); }

    void add(std::string name, double value, double threshold, std::string relation, std::string regime) {
        SuiteStatistic s{std::move(name), value, threshold, std::move(relation), std::move(regime)};
        if (s.relation == "<") s.pass = value < threshold;
        else if (s.relation == ">") s.pass = value > threshold;
        else if (s.relation == ">=") s.pass = value >= threshold;
        report.statistics.push_back(std::move(s));
    }
    void within(std::string name, double value, double lo, double hi, std::string regime) {
        SuiteStatistic s{std::move(name), value, lo, "in", std::move(regime)};
        s.threshold_hi = hi;
        s.pass = value >= lo && value <= hi;
        report.statistics.push_back(std::move(s));
    }
    void info(std::string name, double value) { report.statistics.push_back({std::move(name), value, 0.0, "info", "info"}); }
};

std::string fmt_key(const char* prefix, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%g", prefix, v);
    return buf;
}

double fraction(const std::vector<char>& flags) {
    double k = 0.0;
    for (char f : flags) k += f ? 1.0 : 0.0;
    return flags.empty() ? 0.0 : k / static_cast<double>(flags.size());
}

struct Marginal {
    std::vector<double> x;
    bool boundary = false;
};

void split_marginals(const std::vector<Marginal>& in, std::vector<std::vector<double>>& cols, std::vector<char>& flags) {
    const std::size_t k = in.empty() ? 0 : in.front().x.size();
    cols.assign(k, {});
    flags.clear();
    for (const auto& m : in) {
        for (std::size_t j = 0; j < k; ++j) cols[j].push_back(m.x[j]);
        flags.push_back(m.boundary ? 1 : 0);
    }
}

// ---------------------------------------------------------------------------------------------

void mixture_vrjp(Ctx& c) {
    const int n = c.integer("n");
    const auto profile = c.unit("domain");
    const auto times = c.p.at("times").get<std::vector<double>>();
    require(!times.empty(), "mixture-vrjp: times must be nonempty");
    const double t_max = *std::max_element(times.begin(), times.end());
    const std::size_t R = c.count("replicas");
    const double alpha = c.num("alpha");
    const std::vector<double> L0 = lattice_restrict(profile, n);

    auto direct = parallel_map<Marginal>(R, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 1);
        const auto run = simulate_vrjp(profile, n, t_max, rng);
        Marginal m;
        for (double t : times) m.x.push_back(run.traj.position_at(t));
        m.boundary = run.traj.boundary_hit;
        return m;
    });
    auto mixture = parallel_map<Marginal>(R, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 2);
        RngStream env_rng = rng.split(1), walk_rng = rng.split(2);
        const auto env = sample_discrete_env(profile, n, env_rng);
        StopRule stop;
        stop.t_max = t_max;
        const auto run = jump_process_in_environment(env.lattice, L0, env.U, stop, walk_rng);
        const auto tc = mixture_time_change(run, L0);
        Marginal m;
        for (double t : times) m.x.push_back(tc.traj.position_at(t));
        m.boundary = run.traj.boundary_hit;
        return m;
    });
    std::vector<std::vector<double>> a, b;
    std::vector<char> fa, fb;
    split_marginals(direct, a, fa);
    split_marginals(mixture, b, fb);
    for (std::size_t j = 0; j < times.size(); ++j) {
        const auto ks = ks_two_sample(a[j], b[j]);
        c.add(fmt_key("ks_p_t=", times[j]), ks.p, alpha, ">", "exact");
        c.info(fmt_key("ks_D_t=", times[j]), ks.D);
    }
    c.info("boundary_fraction_vrjp", fraction(fa));
    c.info("boundary_fraction_mixture", fraction(fb));
}

void mixture_errw(Ctx& c) {
    const int n = c.integer("n");
    const auto profile = c.unit("domain");
    const std::size_t steps = c.count("steps");
    const std::size_t R = c.count("replicas");

    auto direct = parallel_map<Marginal>(R, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 1);
        const auto run = simulate_errw(profile, n, steps, rng);
        return Marginal{{run.traj.position_at(static_cast<double>(steps))}, run.traj.boundary_hit};
    });
    auto mixture = parallel_map<Marginal>(R, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 2);
        RngStream env_rng = rng.split(1), walk_rng = rng.split(2);
        const auto env = sample_gamma_env(profile, n, env_rng);
        const auto run = walk_in_gamma_environment(env.lattice, env.gamma, env.U, steps, walk_rng);
        return Marginal{{run.traj.position_at(static_cast<double>(steps))}, run.traj.boundary_hit};
    });
    std::vector<std::vector<double>> a, b;
    std::vector<char> fa, fb;
    split_marginals(direct, a, fa);
    split_marginals(mixture, b, fb);
    const auto ks = ks_two_sample(a[0], b[0]);
    c.add("ks_p_sites", ks.p, c.num("alpha"), ">", "exact");
    c.info("ks_D_sites", ks.D);
    c.info("boundary_fraction_errw", fraction(fa));
    c.info("boundary_fraction_mixture", fraction(fb));

    const std::size_t RB = c.count("band_replicas");
    if (RB == 0) return;
    const int nb = c.integer("band_n");
    const double q = c.num("band_q");
    const auto band_profile = c.unit("band_domain");
    const auto band_steps = static_cast<std::size_t>(std::floor(std::ldexp(q, 2 * nb)));
    auto errw = parallel_map<Marginal>(RB, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 3);
        const auto run = simulate_errw(band_profile, nb, band_steps, rng);
        return Marginal{{run.traj.position_at(static_cast<double>(band_steps))}, run.traj.boundary_hit};
    });
    auto envd = parallel_map<Marginal>(RB, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 4);
        StopRule stop;
        stop.primary = q;
        const auto run = simulate_env_diffusion(band_profile, nb, stop, rng);
        return Marginal{{run.run.traj.position_at(q)}, run.run.traj.boundary_hit};
    });
    split_marginals(errw, a, fa);
    split_marginals(envd, b, fb);
    c.add("ks_D_errw_vs_envdiff", ks_two_sample(a[0], b[0]).D, c.num("band"), "<", "band");
    c.info("boundary_fraction_band", std::max(fraction(fa), fraction(fb)));
}

void martingale(Ctx& c) {
    const int n = c.integer("n");
    const auto profile = c.unit("domain");
    const std::size_t R = c.count("replicas");
    const double u_max = c.num("u_max");
    const auto windows = c.p.at("windows").get<std::vector<double>>();
    const auto points = c.p.at("var_points").get<std::vector<double>>();
    require(windows.size() >= 3, "martingale: windows needs at least three boundaries");
    require(windows.back() <= u_max && points.back() <= u_max, "martingale: sample points beyond u_max");

    struct Out {
        std::vector<double> at_windows, at_points;
        double sum = 0.0, sumsq = 0.0;
        std::size_t jumps = 0;
        bool short_run = false;
    };
    auto outs = parallel_map<Out>(R, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 1);
        StopRule stop;
        stop.u_max = u_max;
        const auto run = simulate_vrjp(profile, n, stop, rng);
        const auto tr = track_martingale(run);
        Out o;
        for (double u : windows) o.at_windows.push_back(tr.value_at(u));
        for (double u : points) o.at_points.push_back(tr.value_at(u));
        double prev = 0.0;
        for (double m : tr.M) {
            const double d = m - prev;
            o.sum += d;
            o.sumsq += d * d;
            prev = m;
        }
        o.jumps = tr.M.size();
        o.short_run = run.traj.boundary_hit || tr.u_end < u_max - 1e-9;
        return o;
    });

    double sum = 0.0, sumsq = 0.0;
    std::size_t jumps = 0, short_runs = 0;
    std::vector<double> du, dm2;
    std::vector<std::vector<double>> at(points.size());
    for (const auto& o : outs) {
        sum += o.sum;
        sumsq += o.sumsq;
        jumps += o.jumps;
        short_runs += o.short_run ? 1 : 0;
        for (std::size_t w = 1; w < windows.size(); ++w) {
            const double d = o.at_windows[w] - o.at_windows[w - 1];
            du.push_back(windows[w] - windows[w - 1]);
            dm2.push_back(d * d);
        }
        for (std::size_t k = 0; k < points.size(); ++k) at[k].push_back(o.at_points[k]);
    }
    const double N = static_cast<double>(jumps);
    const double m1 = sum / N;
    const double sd = std::sqrt(std::max(sumsq / N - m1 * m1, 0.0));
    c.add("sojourns", N, static_cast<double>(c.count("min_sojourns")), ">=", "info");
    c.add("increment_mean_sigmas", std::abs(m1) / (sd / std::sqrt(N)), c.num("mean_sigmas"), "<", "exact");
    const auto fit = least_squares(du, dm2);
    c.add("slope_abs_error", std::abs(fit.slope - 1.0), c.num("slope_tol"), "<", "exact");
    c.info("slope", fit.slope);
    c.info("slope_se", fit.slope_se);
    c.info("intercept", fit.intercept);
    for (std::size_t k = 0; k < points.size(); ++k)
        c.add(fmt_key("var_rel_error_u=", points[k]), std::abs(variance(at[k]) / points[k] - 1.0), c.num("var_tol"), "<",
              "exact");
    c.info("short_runs", static_cast<double>(short_runs));
}

double linear_flow_oracle(double y, double m, double u) {
    if (y == 0.0) {
        if (std::abs(m) < 1.0) return m * u;
        return m > 0 ? u : -u;
    }
    if (y > 0) {
        if (m <= -1.0) return y - u;
        const double s = y / (1.0 + m);
        if (u <= s) return y - u;
        return (m > 1.0) ? y + u - 2.0 * s : m * u;
    }
    if (m >= 1.0) return y + u;
    const double s = -y / (1.0 - m);
    if (u <= s) return y + u;
    return (m < -1.0) ? y - u + 2.0 * s : m * u;
}

void flow_oracles(Ctx& c) {
    // Closed forms: frozen driver and linear drivers B(u) = m u.
    double closed_err = 0.0;
    {
        const auto y = uniform_grid(1.5, 31);
        const double du = 1e-3;
        for (double m : {0.0, 2.0, -2.0, 0.5, -0.3, 3.7}) {
            FlowIntegrator f(y);
            for (int k = 1; k <= 2000; ++k) {
                f.step(m * du * k, du);
                for (std::size_t i = 0; i < y.size(); ++i) {
                    const double expect = m == 0.0 ? (y[i] > 0 ? std::max(y[i] - f.u(), 0.0) : std::min(y[i] + f.u(), 0.0))
                                                   : linear_flow_oracle(y[i], m, f.u());
                    closed_err = std::max(closed_err, std::abs(f.psi(i) - expect));
                }
            }
        }
    }
    c.add("closed_form_max_error", closed_err, c.num("closed_form_tol"), "<", "deterministic");

    const std::size_t D = c.count("drivers");
    const double du = c.num("du"), u_max = c.num("u_max");
    const auto y = uniform_grid(c.num("span"), c.count("points"));
    const std::size_t restart_drivers = c.count("restart_drivers");
    const double restart_u = c.num("restart_u");
    struct Out {
        std::size_t mono = 0, lip = 0, merged = 0;
        double restart = 0.0;
    };
    auto outs = parallel_map<Out>(D, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 1);
        const auto drv = brownian_path(du, u_max, rng);
        FlowIntegrator f(y);
        Out o;
        std::vector<double> prev = f.psi_all();
        const auto k0 = static_cast<std::size_t>(std::llround(restart_u / du));
        std::vector<double> at_k0;
        for (std::size_t k = 1; k <= drv.steps(); ++k) {
            f.step(drv.values[k], drv.du);
            const auto cur = f.psi_all();
            for (std::size_t i = 0; i < cur.size(); ++i) {
                // Lines that slide on the same driver segment coalesce for good, so order is non-strict.
                if (i > 0 && cur[i] < cur[i - 1]) ++o.mono;
                if (std::abs(cur[i] - prev[i]) > drv.du + 1e-12) ++o.lip;
            }
            prev = cur;
            if (k == k0) at_k0 = cur;
        }
        for (std::size_t i = 1; i < prev.size(); ++i) o.merged += prev[i] == prev[i - 1] ? 1 : 0;
        if (r < restart_drivers && !at_k0.empty()) {
            const double b0 = drv.values[k0];
            for (double& v : at_k0) v -= b0;
            FlowIntegrator g(y, at_k0, 0.0);
            for (std::size_t j = k0 + 1; j <= drv.steps(); ++j) g.step(drv.values[j] - b0, drv.du);
            for (std::size_t i = 0; i < y.size(); ++i) o.restart = std::max(o.restart, std::abs(g.psi(i) + b0 - f.psi(i)));
        }
        return o;
    });
    std::size_t mono = 0, lip = 0, merged = 0;
    double restart = 0.0;
    for (const auto& o : outs) {
        mono += o.mono;
        lip += o.lip;
        merged += o.merged;
        restart = std::max(restart, o.restart);
    }
    c.add("monotonicity_violations", static_cast<double>(mono), 0.5, "<", "deterministic");
    c.add("lipschitz_violations", static_cast<double>(lip), 0.5, "<", "deterministic");
    c.add("restart_max_error", restart, c.num("restart_tol"), "<", "deterministic");
    c.info("coalesced_pairs_at_u_max", static_cast<double>(merged));
}

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return ys.front();
    if (it == xs.end()) return ys.back();
    const auto k = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return ys[k - 1] + w * (ys[k] - ys[k - 1]);
}

void localtime_identity(Ctx& c) {
    const std::size_t D = c.count("drivers");
    const double du = c.num("du"), u_max = c.num("u_max"), w = c.num("bin");
    const auto y = uniform_grid(c.num("span"), c.count("points"));
    const std::size_t substeps = c.count("xi_substeps");
    struct Out {
        double sup = 0.0, max_lambda = 0.0;
    };
    auto outs = parallel_map<Out>(D, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 1);
        const auto drv = brownian_path(du, u_max, rng);
        FlowRunOptions fo;
        fo.xi_substeps = substeps;
        const auto run = flow_run(drv, y, u_max, fo);
        const FlowState& s = run.checkpoints.back();
        const auto bins = occupation_binning(run.xi, run.xi_du, w);
        Out o;
        for (double l : local_times(s).Lambda) o.max_lambda = std::max(o.max_lambda, l);
        const auto k_lo = static_cast<long>(std::ceil(y.front() / w));
        const auto k_hi = static_cast<long>(std::floor(y.back() / w)) - 1;
        for (long k = k_lo; k <= k_hi; ++k) {
            const double a = static_cast<double>(k) * w, b = a + w;
            // Bin average of Lambda from the flow: (1 - (Psi(b) - Psi(a)) / w) / 2.
            const double lam_flow = 0.5 * (1.0 - (interp(y, s.psi, b) - interp(y, s.psi, a)) / w);
            const long j = k - bins.first_bin;
            const double lam_occ =
                (j >= 0 && j < static_cast<long>(bins.density.size())) ? bins.density[static_cast<std::size_t>(j)] : 0.0;
            o.sup = std::max(o.sup, std::abs(lam_flow - lam_occ));
        }
        return o;
    });
    double mean_sup = 0.0, worst = 0.0, max_lambda = 0.0;
    for (const auto& o : outs) {
        mean_sup += o.sup / static_cast<double>(D);
        worst = std::max(worst, o.sup);
        max_lambda = std::max(max_lambda, o.max_lambda);
    }
    c.add("mean_sup_bin_error", mean_sup, c.num("tol"), "<", "band");
    c.info("worst_sup_bin_error", worst);
    c.add("max_Lambda", max_lambda, 0.5, "<", "deterministic");
}

void qv(Ctx& c) {
    const std::size_t D = c.count("drivers");
    const double du = c.num("flow_du"), u_max = c.num("u_max"), part = c.num("partition");
    const std::size_t substeps = c.count("xi_substeps");
    const double xi_du = du / static_cast<double>(std::max<std::size_t>(substeps, 1));
    const auto stride = static_cast<std::size_t>(std::llround(part / xi_du));
    require(stride >= 1 && std::abs(static_cast<double>(stride) * xi_du - part) < 1e-9 * part,
            "qv: partition must be a multiple of the xi sample spacing");
    const auto y = uniform_grid(c.num("span"), c.count("points"));
    auto ratios = parallel_map<double>(D, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 1);
        const auto drv = brownian_path(du, u_max, rng);
        FlowRunOptions fo;
        fo.xi_substeps = substeps;
        const auto run = flow_run(drv, y, u_max, fo);
        double integral = 0.0;
        for (std::size_t k = 1; k < run.lambda_at_xi.size(); ++k) {
            const double g0 = std::pow(1.0 - 2.0 * run.lambda_at_xi[k - 1], -2.0);
            const double g1 = std::pow(1.0 - 2.0 * run.lambda_at_xi[k], -2.0);
            integral += 0.5 * (g0 + g1) * run.xi_du;
        }
        return quadratic_variation(run.xi, stride) / integral;
    });
    const double m = mean(ratios);
    c.add("mean_ratio_abs_error", std::abs(m - 1.0), c.num("tol"), "<", "band");
    c.info("mean_ratio", m);
    c.info("ratio_sd", std::sqrt(variance(ratios)));
}

void hitting(Ctx& c) {
    const double x1 = c.num("x1"), x2 = c.num("x2"), xs = c.num("symmetric_x");
    const std::size_t R = c.count("replicas");
    const double du = c.num("du"), u_max = c.num("u_max");
    const auto y = uniform_grid(c.num("span"), c.count("points"));
    const auto profile = OccupationProfile::constant(1.0, -c.num("span") - 1.0, c.num("span") + 1.0);
    const std::uint64_t oracle_seed = c.seed ^ 0x9e3779b97f4a7c15ULL;
    c.report.seeds.push_back(oracle_seed);

    // Unit profile from 0: the scale distances are y_i = x_i.
    const auto oracle = race_oracle(x1, x2, c.num("oracle_step"), c.count("oracle_replicas"), oracle_seed, c.threads);

    struct Out {
        RaceOutcome main, sym;
    };
    auto outs = parallel_map<Out>(R, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 1);
        const auto drv = brownian_path(du, u_max, rng);
        LrmOptions opt;
        opt.t_max = kInf;
        const auto path = build_lrm(drv, y, profile, 0.0, opt);
        return Out{hitting_race(path, 0.0, x1, x2), hitting_race(path, 0.0, -xs, xs)};
    });
    std::size_t up = 0, up_sym = 0, undecided = 0;
    for (const auto& o : outs) {
        up += o.main == RaceOutcome::HitX2First ? 1 : 0;
        up_sym += o.sym == RaceOutcome::HitX2First ? 1 : 0;
        undecided += (o.main == RaceOutcome::Undecided ? 1 : 0) + (o.sym == RaceOutcome::Undecided ? 1 : 0);
    }
    const double n = static_cast<double>(R), no = static_cast<double>(oracle.replicas);
    const double p = static_cast<double>(up) / n;
    const double po = static_cast<double>(oracle.upper_first) / no;
    const double se = std::sqrt(p * (1.0 - p) / n + po * (1.0 - po) / no);
    c.add("race_sigmas", std::abs(p - po) / se, c.num("sigmas"), "<", "exact");
    c.info("lrm_frequency", p);
    c.info("oracle_estimate", po);
    c.info("oracle_ci_lo", oracle.ci.lo);
    c.info("oracle_ci_hi", oracle.ci.hi);
    const double ps = static_cast<double>(up_sym) / n;
    c.add("symmetric_sigmas", std::abs(ps - 0.5) / std::sqrt(0.25 / n), c.num("sigmas"), "<", "exact");
    c.info("symmetric_frequency", ps);
    c.info("undecided", static_cast<double>(undecided));
}

void scaling(Ctx& c) {
    const double cc = c.num("c"), t = c.num("t"), du = c.num("du");
    require(cc > 0.0, "scaling: c must be positive");
    const std::size_t R = c.count("replicas");
    const auto y = uniform_grid(c.num("span"), c.count("points"));
    const double c2 = cc * cc, c3 = c2 * cc;
    const auto unit = OccupationProfile::constant(1.0, -8.0, 8.0);
    const auto scaled = OccupationProfile::constant(cc, -8.0 * c2, 8.0 * c2);
    // t(u) >= c^3 u for profile c, so u = t / c^3 always reaches the horizon.
    const double u_max = t / c3 + 2.0 * du;
    std::vector<char> short_a(R), short_b(R);
    auto a = parallel_map<double>(R, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 1);
        LrmOptions opt;
        opt.t_max = t / c3;
        const auto path = rescale(build_lrm(brownian_path(du, u_max, rng), y, unit, 0.0, opt), cc);
        short_a[r] = path.short_path;
        return path.position_at(t);
    });
    auto b = parallel_map<double>(R, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 2);
        LrmOptions opt;
        opt.t_max = t;
        const auto path = build_lrm(brownian_path(du, u_max, rng), y, scaled, 0.0, opt);
        short_b[r] = path.short_path;
        return path.position_at(t);
    });
    const auto ks = ks_two_sample(a, b);
    c.add("ks_p", ks.p, c.num("alpha"), ">", "exact");
    c.info("ks_D", ks.D);
    c.info("short_fraction", std::max(fraction(short_a), fraction(short_b)));
}

void cross_construction(Ctx& c) {
    const double t = c.num("t"), du = c.num("du");
    const std::size_t R = c.count("replicas");
    const auto profile = c.unit("domain");
    const auto y = uniform_grid(c.num("span"), c.count("points"));
    const int n = c.integer("vrjp_n"), m = c.integer("m");
    std::vector<char> fv(R), fl(R), fe(R);
    auto vrjp = parallel_map<double>(R, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 1);
        const auto run = simulate_vrjp(profile, n, t, rng);
        fv[r] = run.traj.boundary_hit;
        return run.traj.position_at(t);
    });
    auto lrm = parallel_map<double>(R, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 2);
        LrmOptions opt;
        opt.t_max = t;
        // t(u) >= u for the unit profile.
        const auto path = build_lrm(brownian_path(du, t + 2.0 * du, rng), y, profile, 0.0, opt);
        fl[r] = path.short_path;
        return path.position_at(t);
    });
    auto envd = parallel_map<double>(R, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 3);
        StopRule stop;
        stop.t_max = t;
        const auto run = simulate_env_diffusion(profile, m, stop, rng);
        fe[r] = run.run.traj.boundary_hit;
        return time_change_to_lrm(run).traj.position_at(t);
    });
    const double band = c.num("band");
    c.add("ks_D_vrjp_lrm", ks_two_sample(vrjp, lrm).D, band, "<", "band");
    c.add("ks_D_vrjp_envdiff", ks_two_sample(vrjp, envd).D, band, "<", "band");
    c.add("ks_D_lrm_envdiff", ks_two_sample(lrm, envd).D, band, "<", "band");
    c.info("boundary_fraction_vrjp", fraction(fv));
    c.info("short_fraction_lrm", fraction(fl));
    c.info("boundary_fraction_envdiff", fraction(fe));

    const std::size_t RX = c.count("xi_replicas");
    if (RX == 0) return;
    const double uu = c.num("xi_u");
    const int xm = c.integer("xi_m");
    auto flow_xi = parallel_map<double>(RX, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 4);
        const auto drv = brownian_path(du, uu, rng);
        return flow_run(drv, y, uu).xi.back();
    });
    std::vector<char> fx(RX);
    auto env_xi = parallel_map<double>(RX, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 5);
        StopRule stop;
        stop.u_max = uu;
        const auto run = simulate_env_diffusion(profile, xm, stop, rng);
        fx[r] = run.run.traj.boundary_hit;
        return xi_representation(run).traj.position_at(uu);
    });
    c.add("ks_D_xi", ks_two_sample(flow_xi, env_xi).D, band, "<", "band");
    c.info("boundary_fraction_xi", fraction(fx));
}

void occupation_ratio(Ctx& c) {
    const std::size_t E = c.count("environments");
    const int m = c.integer("m");
    const double q = c.num("q");
    const auto profile = c.unit("domain");
    const auto win = c.p.at("window").get<std::vector<double>>();
    require(win.size() == 2 && win[0] < win[1], "occupation-ratio: window must be [lo, hi]");
    struct Out {
        double dev = 0.0;
        bool boundary = false;
    };
    auto outs = parallel_map<Out>(E, c.threads, [&](std::size_t e) {
        RngStream rng = c.stream(e, 1);
        StopRule stop;
        stop.primary = q;
        const auto run = simulate_env_diffusion(profile, m, stop, rng);
        const auto& f = run.run.field;
        const auto U = run.env->on_lattice(f.lattice);
        double lo = kInf, hi = -kInf;
        for (std::size_t i = 0; i < f.occ.size(); ++i) {
            const double x = f.lattice.x(i);
            if (x < win[0] || x > win[1]) continue;
            const double L0 = f.base[i];
            const double Lstar = std::sqrt(L0 * L0 + 2.0 * f.occ[i]);
            const double d = std::log(Lstar) - (std::log(L0) - U[i]);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        return Out{hi - lo, run.run.traj.boundary_hit};
    });
    double worst = 0.0, avg = 0.0;
    std::size_t bh = 0;
    for (const auto& o : outs) {
        worst = std::max(worst, o.dev);
        avg += o.dev / static_cast<double>(E);
        bh += o.boundary ? 1 : 0;
    }
    c.add("max_log_ratio_deviation", worst, c.num("tol"), "<", "band");
    c.info("mean_log_ratio_deviation", avg);
    c.info("boundary_hits", static_cast<double>(bh));
}

void sampler_moments(Ctx& c) {
    const double K = c.num("K"), KG = c.num("K_gauss");
    const std::size_t N = c.count("draws");
    constexpr std::size_t chunk = 1 << 16;
    const std::size_t chunks = (N + chunk - 1) / chunk;
    auto draw = [&](double k, std::uint64_t arm) {
        auto parts = parallel_map<std::vector<double>>(chunks, c.threads, [&](std::size_t j) {
            RngStream rng = c.stream(j, arm);
            std::vector<double> v(std::min(N, (j + 1) * chunk) - j * chunk);
            for (double& x : v) x = sample_sinh_v(k, rng);
            return v;
        });
        std::vector<double> all;
        all.reserve(N);
        for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
        return all;
    };
    const auto v = draw(K, 1);
    // exp(-V) has mean 1 exactly, so V + exp(-V) - 1 is an unbiased, low-variance estimator of E[V].
    std::vector<double> cv(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) cv[i] = v[i] + std::exp(-v[i]) - 1.0;
    c.add("mean_rel_error", std::abs(K * mean(cv) - 1.0), c.num("mean_tol"), "<", "exact");
    c.info("mean_rel_error_plain", std::abs(K * mean(v) - 1.0));
    c.info("mean_rel_se_plain", K * std::sqrt(variance(v) / static_cast<double>(v.size())));
    c.add("var_rel_error", std::abs(K * variance(v) / 2.0 - 1.0), c.num("var_tol"), "<", "exact");

    auto g = draw(KG, 2);
    const double s = std::sqrt(KG / 2.0);
    for (double& x : g) x = s * (x - 1.0 / KG);
    const auto ks = ks_one_sample(g, [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); });
    c.add("gauss_ks_D", ks.D, c.num("ks_tol"), "<", "band");
}

void growth(Ctx& c) {
    c.report.gating = false;
    const int n = c.integer("n");
    const auto profile = c.unit("domain");
    const double t_lo = c.num("t_min"), t_hi = c.num("t_max");
    const std::size_t P = c.count("points"), R = c.count("replicas");
    require(P >= 2 && t_lo > 0.0 && t_hi > t_lo, "growth: need points >= 2 and 0 < t_min < t_max");
    std::vector<double> ts(P);
    for (std::size_t k = 0; k < P; ++k)
        ts[k] = t_lo * std::pow(t_hi / t_lo, static_cast<double>(k) / static_cast<double>(P - 1));
    const double h = std::ldexp(1.0, -n);
    struct Out {
        std::vector<double> maxima;
        bool boundary = false;
    };
    auto outs = parallel_map<Out>(R, c.threads, [&](std::size_t r) {
        RngStream rng = c.stream(r, 1);
        Out o;
        o.maxima.assign(P, 0.0);
        long running = 0;
        std::size_t k = 0;
        StopRule stop;
        stop.primary = t_hi;
        const auto run = simulate_vrjp_streaming(profile, n, stop, rng, [&](double t, long site) {
            while (k < P && ts[k] < t) o.maxima[k++] = h * static_cast<double>(running);
            running = std::max(running, std::labs(site));
        });
        while (k < P) o.maxima[k++] = h * static_cast<double>(running);
        o.boundary = run.traj.boundary_hit;
        return o;
    });
    std::vector<double> lx(P), ly(P, 0.0);
    std::size_t bh = 0;
    for (std::size_t k = 0; k < P; ++k) {
        lx[k] = std::log(ts[k]);
        for (const auto& o : outs) ly[k] += std::log(std::max(o.maxima[k], h)) / static_cast<double>(R);
    }
    for (const auto& o : outs) bh += o.boundary ? 1 : 0;
    const auto fit = least_squares(lx, ly);
    const auto range = c.p.at("range").get<std::vector<double>>();
    c.within("log_max_vs_log_t_slope", fit.slope, range.at(0), range.at(1), "diagnostic");
    c.info("slope_se", fit.slope_se);
    c.info("boundary_hits", static_cast<double>(bh));
}

struct SuiteDef {
    json defaults;
    void (*run)(Ctx&);
};

const std::map<std::string, SuiteDef>& registry() {
    static const std::map<std::string, SuiteDef> r = {
        {"mixture-vrjp",
         {{{"n", 5}, {"domain", {-2.0, 2.0}}, {"times", {0.1, 0.5}}, {"replicas", 20000}, {"alpha", 0.01}}, mixture_vrjp}},
        {"mixture-errw",
         {{{"n", 4},
           {"domain", {-9.0, 9.0}},
           {"steps", 128},
           {"replicas", 20000},
           {"alpha", 0.01},
           {"band_n", 8},
           {"band_q", 0.5},
           {"band_domain", {-4.0, 4.0}},
           {"band_replicas", 5000},
           {"band", 0.05}},
          mixture_errw}},
        {"martingale",
         {{{"n", 5},
           {"domain", {-8.0, 8.0}},
           {"replicas", 10000},
           {"u_max", 1.0},
           {"windows", {0.0, 0.05, 0.15, 0.3, 0.5, 0.75, 1.0}},
           {"var_points", {0.25, 0.5, 1.0}},
           {"min_sojourns", 100000},
           {"mean_sigmas", 3.0},
           {"slope_tol", 0.05},
           {"var_tol", 0.05}},
          martingale}},
        {"flow-oracles",
         {{{"drivers", 1000},
           {"du", 1e-4},
           {"u_max", 1.0},
           {"span", 6.0},
           {"points", 241},
           {"closed_form_tol", 1e-9},
           {"restart_tol", 1e-12},
           {"restart_drivers", 20},
           {"restart_u", 0.4}},
          flow_oracles}},
        {"localtime-identity",
         {{{"drivers", 100},
           {"du", 1e-4},
           {"u_max", 1.0},
           {"bin", 0.05},
           {"span", 6.0},
           {"points", 241},
           {"xi_substeps", 16},
           {"tol", 0.05}},
          localtime_identity}},
        {"qv",
         {{{"drivers", 100},
           {"partition", 1e-4},
           {"flow_du", 1e-4},
           {"xi_substeps", 1},
           {"u_max", 1.0},
           {"span", 6.0},
           {"points", 241},
           {"tol", 0.10}},
          qv}},
        {"hitting",
         {{{"x1", -2.0},
           {"x2", 1.0},
           {"symmetric_x", 1.0},
           {"oracle_replicas", 1000000},
           {"oracle_step", 1e-4},
           {"replicas", 10000},
           {"du", 1e-4},
           {"u_max", 2.0},
           {"span", 3.5},
           {"points", 1401},
           {"sigmas", 3.0}},
          hitting}},
        {"scaling",
         {{{"c", 2.0}, {"t", 1.0}, {"replicas", 10000}, {"du", 1e-4}, {"span", 3.0}, {"points", 601}, {"alpha", 0.01}},
          scaling}},
        {"cross-construction",
         {{{"t", 1.0},
           {"replicas", 10000},
           {"domain", {-4.0, 4.0}},
           {"vrjp_n", 8},
           {"du", 1e-4},
           {"span", 4.0},
           {"points", 801},
           {"m", 8},
           {"band", 0.05},
           {"xi_u", 0.5},
           {"xi_m", 7},
           {"xi_replicas", 10000}},
          cross_construction}},
        {"occupation-ratio",
         {{{"environments", 10}, {"m", 6}, {"q", 1e4}, {"domain", {-16.0, 16.0}}, {"window", {-1.0, 1.0}}, {"tol", 0.1}},
          occupation_ratio}},
        {"sampler-moments",
         {{{"K", 1024.0},
           {"draws", 1000000},
           {"K_gauss", 4096.0},
           {"mean_tol", 0.02},
           {"var_tol", 0.05},
           {"ks_tol", 0.01}},
          sampler_moments}},
        {"growth",
         {{{"n", 0},
           {"domain", {-4000.0, 4000.0}},
           {"t_min", 1e2},
           {"t_max", 1e5},
           {"points", 25},
           {"replicas", 4},
           {"range", {0.15, 0.55}}},
          growth}},
    };
    return r;
}

}  // namespace

bool TestReport::pass() const {
    return std::all_of(statistics.begin(), statistics.end(), [](const SuiteStatistic& s) { return s.pass; });
}

json TestReport::to_json() const {
    json stats = json::array();
    for (const auto& s : statistics) {
        json j = {{"name", s.name}, {"value", s.value}, {"regime", s.regime}, {"pass", s.pass}};
        if (s.relation == "in") j["threshold"] = {s.threshold, s.threshold_hi};
        else if (s.relation != "info") j["threshold"] = s.threshold;
        j["relation"] = s.relation;
        stats.push_back(std::move(j));
    }
    return {{"suite", suite},   {"params", params},       {"statistics", stats}, {"seeds", seeds},
            {"pass", pass()},   {"gating", gating},       {"runtime_s", runtime_s}};
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : registry()) v.push_back(k);
        return v;
    }();
    return names;
}

json suite_defaults(const std::string& name) {
    const auto it = registry().find(name);
    if (it == registry().end()) fail_invalid("unknown suite: " + name);
    return it->second.defaults;
}

TestReport run_suite(const std::string& name, const json& config, std::uint64_t seed, unsigned threads) {
    const auto it = registry().find(name);
    if (it == registry().end()) fail_invalid("unknown suite: " + name);
    json params = it->second.defaults;
    if (!config.is_null()) {
        require(config.is_object(), "suite config must be a JSON object");
        for (const auto& [k, v] : config.items()) {
            if (!params.contains(k)) fail_invalid("suite " + name + ": unknown parameter '" + k + "'");
            params[k] = v;
        }
    }
    TestReport report;
    report.suite = name;
    report.params = params;
    report.seeds.push_back(seed);
    const auto t0 = std::chrono::steady_clock::now();
    Ctx ctx{params, seed, threads, report};
    try {
        it->second.run(ctx);
    } catch (const nlohmann::json::exception& e) {
        fail_invalid("suite " + name + ": bad parameter: " + e.what());
    }
    report.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace lrmsim
