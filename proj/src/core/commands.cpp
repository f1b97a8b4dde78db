#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <set>

#include "brownian.hpp"
#include "csv.hpp"
#include "envdiff.hpp"
#include "environment.hpp"
#include "error.hpp"
#include "flow.hpp"
#include "lattice.hpp"
#include "lrm.hpp"
#include "parallel.hpp"
#include "profile.hpp"
#include "suites.hpp"

namespace lrmsim {

using json = nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxWidenings = 10;

// Reads fields from the user config, records the effective values and rejects leftovers.
class Cfg {
public:
    Cfg(std::string command, const json& j) : command_(std::move(command)), in_(j.is_null() ? json::object() : j) {
        require(in_.is_object(), command_ + ": config must be a JSON object");
        eff_ = json::object();
    }

    bool has(const std::string& k) const { return in_.contains(k) && !in_[k].is_null(); }

    double num(const std::string& k, double def) { return has(k) ? num(k) : record(k, def); }
    double num(const std::string& k) {
        const json& v = field(k);
        require(v.is_number(), field_error(k, "must be a number"));
        return record(k, v.get<double>());
    }
    long integer(const std::string& k, long def) { return has(k) ? integer(k) : record(k, def); }
    long integer(const std::string& k) {
        const json& v = field(k);
        require(v.is_number_integer() || (v.is_number() && std::floor(v.get<double>()) == v.get<double>()),
                field_error(k, "must be an integer"));
        return record(k, v.is_number_integer() ? v.get<long>() : static_cast<long>(v.get<double>()));
    }
    std::size_t count(const std::string& k, std::size_t def, std::size_t min = 1) {
        const long v = integer(k, static_cast<long>(def));
        require(v >= static_cast<long>(min), field_error(k, "must be at least " + std::to_string(min)));
        return static_cast<std::size_t>(v);
    }
    std::string str(const std::string& k, const std::string& def) {
        if (!has(k)) return record(k, def);
        const json& v = field(k);
        require(v.is_string(), field_error(k, "must be a string"));
        return record(k, v.get<std::string>());
    }
    std::uint64_t seed() {
        if (!has("seed")) return record<std::uint64_t>("seed", 1);
        const json& v = field("seed");
        require(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0),
                field_error("seed", "must be a non-negative integer"));
        return record("seed", v.get<std::uint64_t>());
    }
    unsigned threads() {
        used_.insert("threads");  // not recorded: outputs do not depend on it
        if (!has("threads")) return 0;
        const json& v = in_["threads"];
        require(v.is_number_integer() && v.get<long>() >= 0, field_error("threads", "must be a non-negative integer"));
        return static_cast<unsigned>(v.get<long>());
    }
    std::pair<double, double> domain(double lo, double hi) {
        if (has("domain")) {
            const json& v = field("domain");
            require(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(),
                    field_error("domain", "must be [lo, hi]"));
            lo = v[0].get<double>();
            hi = v[1].get<double>();
        }
        eff_["domain"] = {lo, hi};
        used_.insert("domain");
        return {lo, hi};
    }
    std::vector<double> list(const std::string& k) {
        std::vector<double> out;
        if (has(k)) {
            const json& v = field(k);
            require(v.is_array(), field_error(k, "must be an array of numbers"));
            for (const auto& e : v) {
                require(e.is_number(), field_error(k, "must be an array of numbers"));
                out.push_back(e.get<double>());
            }
        }
        eff_[k] = out;
        used_.insert(k);
        return out;
    }
    OccupationProfile profile(double lo, double hi, const char* fallback) {
        if (has("profile")) return profile(lo, hi);
        const OccupationProfile p = OccupationProfile::builtin(fallback, lo, hi);
        eff_["profile"] = json::parse(p.to_json());
        used_.insert("profile");
        return p;
    }
    OccupationProfile profile(double lo, double hi) {
        const json& v = field("profile");
        used_.insert("profile");
        OccupationProfile p;
        try {
            if (v.is_object()) {
                json o = v;
                if (!o.contains("domain")) o["domain"] = {lo, hi};
                p = OccupationProfile::from_json(o.dump());
            } else if (v.is_number()) {
                p = OccupationProfile::constant(v.get<double>(), lo, hi);
            } else if (v.is_string()) {
                const std::string s = v.get<std::string>();
                if (s.size() > 5 && s.compare(s.size() - 5, 5, ".json") == 0) {
                    json o = json::parse(read_text_file(s));
                    if (o.is_object() && !o.contains("domain")) o["domain"] = {lo, hi};
                    p = OccupationProfile::from_json(o.dump());
                } else {
                    p = OccupationProfile::builtin(s, lo, hi);
                }
            } else {
                fail_invalid("");
            }
        } catch (const json::exception& e) {
            fail_invalid(field_error("profile", e.what()));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Io) throw;
            fail_invalid(field_error("profile", e.what()));
        }
        eff_["profile"] = json::parse(p.to_json());
        return p;
    }

    // Unknown fields are errors; call after all reads.
    void finish() const {
        for (auto it = in_.begin(); it != in_.end(); ++it)
            if (!used_.count(it.key())) fail_invalid(command_ + ": unknown config field '" + it.key() + "'");
    }
    const json& effective() const { return eff_; }
    const std::string& command() const { return command_; }
    std::string field_error(const std::string& k, const std::string& what) const {
        return command_ + ": field '" + k + "' " + what;
    }

private:
    std::string command_;
    json in_, eff_;
    std::set<std::string> used_;

    const json& field(const std::string& k) {
        require(has(k), command_ + ": missing required field '" + k + "'");
        used_.insert(k);
        return in_[k];
    }
    template <class T>
    T record(const std::string& k, T v) {
        used_.insert(k);
        eff_[k] = v;
        return v;
    }
};

std::string header(const Cfg& c, const std::string& table, json extra = json::object()) {
    json h = {{"command", c.command()}, {"table", table}, {"config", c.effective()}, {"version", library_version()}};
    for (auto it = extra.begin(); it != extra.end(); ++it) h[it.key()] = it.value();
    return h.dump();
}

RngStream replica_stream(std::uint64_t seed, std::size_t r, std::uint64_t arm) { return RngStream(seed, r).split(arm); }

void append_trajectory(CsvTable& t, long long r, const JumpTrajectory& tr) {
    t.row({r, 0.0, static_cast<long long>(tr.start_site)});
    for (std::size_t k = 0; k < tr.jumps(); ++k) t.row({r, tr.jump_times[k], static_cast<long long>(tr.sites[k])});
}

void append_local_time(CsvTable& t, long long r, const LatticeRun& run, double occ_scale, bool add_base) {
    long smin = run.traj.start_site, smax = smin;
    for (long s : run.traj.sites) {
        smin = std::min(smin, s);
        smax = std::max(smax, s);
    }
    const Lattice& lat = run.field.lattice;
    for (long s = smin; s <= smax; ++s) {
        const auto idx = static_cast<std::size_t>(s - lat.i_min);
        const double L = (add_base ? run.field.base[idx] : 0.0) + occ_scale * run.field.occ[idx];
        t.row({r, static_cast<long long>(s), run.traj.end_time, L});
    }
}

CommandResult lattice_tables(const Cfg& c, const std::vector<LatticeRun>& runs, double occ_scale, bool add_base,
                             const std::string& lt_column, const std::string& clock) {
    const json extra = {{"n", runs.empty() ? 0 : runs.front().field.lattice.n}, {"clock", clock}};
    CsvTable traj(header(c, "trajectory", extra), {"replica_id", "time", "site"});
    CsvTable lt(header(c, "local_time", extra), {"replica_id", "site", "time", lt_column});
    std::size_t boundary = 0, jumps = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        append_trajectory(traj, static_cast<long long>(r), runs[r].traj);
        append_local_time(lt, static_cast<long long>(r), runs[r], occ_scale, add_base);
        boundary += runs[r].traj.boundary_hit ? 1 : 0;
        jumps += runs[r].traj.jumps();
    }
    CommandResult out;
    out.summary = {{"command", c.command()}, {"replicas", runs.size()}, {"boundary_hits", boundary}, {"jumps", jumps}};
    out.tables.push_back({"trajectory", traj.str()});
    out.tables.push_back({"local_time", lt.str()});
    return out;
}

CommandResult simulate_vrjp_cmd(Cfg& c) {
    const std::uint64_t seed = c.seed();
    const unsigned threads = c.threads();
    const std::size_t R = c.count("replicas", 1);
    const auto [lo, hi] = c.domain(-16.0, 16.0);
    const OccupationProfile profile = c.profile(lo, hi);
    const int n = static_cast<int>(c.integer("n"));
    const double t_max = c.num("t_max");
    require(n >= 0, c.field_error("n", "must be non-negative"));
    require(t_max > 0.0 && std::isfinite(t_max), c.field_error("t_max", "must be positive and finite"));
    c.finish();
    auto runs = parallel_map<LatticeRun>(R, threads, [&](std::size_t r) {
        RngStream rng = replica_stream(seed, r, 1);
        return simulate_vrjp(profile, n, t_max, rng);
    });
    return lattice_tables(c, runs, 1.0, true, "L", "t");
}

CommandResult simulate_errw_cmd(Cfg& c) {
    const std::uint64_t seed = c.seed();
    const unsigned threads = c.threads();
    const std::size_t R = c.count("replicas", 1);
    const auto [lo, hi] = c.domain(-16.0, 16.0);
    const OccupationProfile profile = c.profile(lo, hi, "unit");
    const int n = static_cast<int>(c.integer("n"));
    const std::size_t steps = c.count("steps", 0, 1);
    require(n >= 1, c.field_error("n", "must be at least 1"));
    c.finish();
    auto runs = parallel_map<LatticeRun>(R, threads, [&](std::size_t r) {
        RngStream rng = replica_stream(seed, r, 1);
        return simulate_errw(profile, n, steps, rng);
    });
    // Each step lasts 4^-n on a site of width 2^-n.
    return lattice_tables(c, runs, std::ldexp(1.0, -n), true, "L", "step");
}

CsvTable continuous_env_table(const Cfg& c, const ContinuousEnvironment& env, const OccupationProfile& profile,
                              json extra) {
    extra["kind"] = "continuous";
    extra["profile_hash"] = profile.hash();
    extra["env_hash"] = env.hash();
    CsvTable t(header(c, "environment", extra), {"point", "x", "y", "W"});
    const ScaleTable& s0 = env.s0();
    for (std::size_t k = 0; k < env.y().size(); ++k)
        t.row({static_cast<long long>(k), s0.invert(env.y()[k]), env.y()[k], env.W()[k]});
    return t;
}

std::shared_ptr<const ContinuousEnvironment> load_quenched(const std::string& path, const OccupationProfile& profile) {
    const CsvData d = parse_csv(read_text_file(path));
    json h;
    try {
        h = json::parse(d.header_json);
    } catch (const json::exception&) {
        fail_invalid("quenched environment '" + path + "': header is not JSON");
    }
    require(h.value("kind", "") == "continuous", "quenched environment '" + path + "': kind must be continuous");
    require(h.value("profile_hash", std::uint64_t{0}) == profile.hash(),
            "quenched environment '" + path + "': profile does not match the run profile");
    const std::size_t cy = d.column("y"), cw = d.column("W");
    std::vector<double> y(d.rows.size()), W(d.rows.size());
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        y[i] = d.number(i, cy);
        W[i] = d.number(i, cw);
    }
    return std::make_shared<const ContinuousEnvironment>(scale_s0(profile, 0.0), std::move(y), std::move(W));
}

CommandResult simulate_envdiff_cmd(Cfg& c) {
    const std::uint64_t seed = c.seed();
    const unsigned threads = c.threads();
    const std::size_t R = c.count("replicas", 1);
    const auto [lo, hi] = c.domain(-16.0, 16.0);
    const OccupationProfile profile = c.profile(lo, hi);
    const int m = static_cast<int>(c.integer("m"));
    StopRule stop;
    stop.primary = c.num("q_max", kInf);
    stop.t_max = c.num("t_max", kInf);
    stop.u_max = c.num("u_max", kInf);
    require(std::isfinite(stop.primary) || std::isfinite(stop.t_max) || std::isfinite(stop.u_max),
            c.command() + ": missing required field 't_max' (or 'q_max' / 'u_max')");
    const std::string clock = c.str("clock", "t");
    require(clock == "t" || clock == "q" || clock == "u", c.field_error("clock", "must be one of t, q, u"));
    const std::string quenched_path = c.str("quenched", "");
    c.finish();
    std::shared_ptr<const ContinuousEnvironment> env;
    if (!quenched_path.empty()) env = load_quenched(quenched_path, profile);
    auto runs = parallel_map<EnvDiffusionRun>(R, threads, [&](std::size_t r) {
        RngStream rng = replica_stream(seed, r, 1);
        return simulate_env_diffusion(profile, m, stop, rng, env);
    });
    std::vector<LatticeRun> out(R);
    for (std::size_t r = 0; r < R; ++r) {
        if (clock == "t") out[r] = time_change_to_lrm(runs[r]);
        else if (clock == "u") out[r] = xi_representation(runs[r]);
        else out[r] = runs[r].run;
    }
    CommandResult res = lattice_tables(c, out, 1.0, clock != "u", clock == "u" ? "Lambda" : "L", clock);
    json hashes = json::array();
    for (const auto& r : runs) hashes.push_back(r.env_hash);
    res.summary["env_hashes"] = hashes;
    res.summary["quenched"] = env != nullptr;
    return res;
}

CommandResult env_sample_cmd(Cfg& c) {
    const std::uint64_t seed = c.seed();
    c.threads();
    const auto [lo, hi] = c.domain(-16.0, 16.0);
    const OccupationProfile profile = c.profile(lo, hi);
    const std::string kind = c.str("kind", "continuous");
    const int n = static_cast<int>(c.integer("n"));
    require(n >= 0, c.field_error("n", "must be non-negative"));
    require(kind == "discrete" || kind == "gamma" || kind == "continuous",
            c.field_error("kind", "must be one of discrete, gamma, continuous"));
    c.finish();
    // Same stream as replica 0 of an annealed run with this seed.
    RngStream rng = replica_stream(seed, 0, 1).split(1);
    CommandResult out;
    const json extra = {{"n", n}};
    if (kind == "continuous") {
        const ContinuousEnvironment env = sample_continuous_env_on_lattice(profile, n, rng);
        out.tables.push_back({"environment", continuous_env_table(c, env, profile, extra).str()});
        out.summary = {{"command", c.command()}, {"kind", kind}, {"env_hash", env.hash()}};
        return out;
    }
    json h = extra;
    h["kind"] = kind;
    h["profile_hash"] = profile.hash();
    if (kind == "discrete") {
        const DiscreteEnvironment env = sample_discrete_env(profile, n, rng);
        CsvTable t(header(c, "environment", h), {"site", "x", "U"});
        for (std::size_t i = 0; i < env.U.size(); ++i)
            t.row({static_cast<long long>(env.lattice.i_min + static_cast<long>(i)), env.lattice.x(i), env.U[i]});
        out.tables.push_back({"environment", t.str()});
    } else {
        const GammaEnvironment env = sample_gamma_env(profile, n, rng);
        CsvTable t(header(c, "environment", h), {"site", "x", "U", "gamma"});
        for (std::size_t i = 0; i < env.U.size(); ++i) {
            const auto site = static_cast<long long>(env.lattice.i_min + static_cast<long>(i));
            if (i < env.gamma.size()) t.row({site, env.lattice.x(i), env.U[i], env.gamma[i]});
            else t.row({site, env.lattice.x(i), env.U[i], std::string()});
        }
        out.tables.push_back({"environment", t.str()});
    }
    out.summary = {{"command", c.command()}, {"kind", kind}};
    return out;
}

struct Grid {
    double span;
    std::size_t points;
    Grid widened() const { return {2.0 * span, 2 * (points - 1) + 1}; }
};

Grid read_grid(Cfg& c, double span, std::size_t points) {
    Grid g{c.num("span", span), c.count("points", points, 3)};
    require(g.span > 0.0, c.field_error("span", "must be positive"));
    return g;
}

CommandResult flow_run_cmd(Cfg& c) {
    const std::uint64_t seed = c.seed();
    const unsigned threads = c.threads();
    const std::size_t R = c.count("replicas", 1);
    const double du = c.num("du", 1e-4), u_max = c.num("u_max", 1.0);
    const Grid grid = read_grid(c, 4.0, 161);
    const std::size_t every = c.count("checkpoint_every", 0, 0);
    c.finish();
    require(du > 0.0 && u_max > 0.0, c.command() + ": du and u_max must be positive");
    struct Out {
        FlowRun run;
        Grid grid;
    };
    auto runs = parallel_map<Out>(R, threads, [&](std::size_t r) {
        RngStream rng = replica_stream(seed, r, 1);
        const BrownianPath drv = brownian_path(du, u_max, rng);
        FlowRunOptions fo;
        fo.checkpoint_every = every;
        fo.log_events = true;
        Grid g = grid;
        for (int w = 0;; ++w, g = g.widened()) {
            try {
                return Out{flow_run(drv, uniform_grid(g.span, g.points), u_max, fo), g};
            } catch (const Error& e) {
                if (e.code() != ErrorCode::RangeError || w == kMaxWidenings) throw;
            }
        }
    });
    CsvTable cp(header(c, "flow_checkpoint"), {"replica_id", "u", "index", "y", "Psi", "Lcal", "Lambda"});
    CsvTable ev(header(c, "flow_events"), {"replica_id", "u_event", "y_index", "kind"});
    json spans = json::array();
    for (std::size_t r = 0; r < R; ++r) {
        const auto rid = static_cast<long long>(r);
        for (const FlowState& s : runs[r].run.checkpoints) {
            const LocalTimeProfile lt = local_times(s);
            for (std::size_t i = 0; i < s.y.size(); ++i)
                cp.row({rid, s.u, static_cast<long long>(i), s.y[i], s.psi[i], lt.Lcal[i], lt.Lambda[i]});
        }
        for (const FlowEvent& e : runs[r].run.events)
            ev.row({rid, e.u, static_cast<long long>(e.index), std::string(event_name(e.kind))});
        spans.push_back(runs[r].grid.span);
    }
    CommandResult out;
    out.summary = {{"command", c.command()}, {"replicas", R}, {"grid_span", spans}};
    out.tables.push_back({"checkpoints", cp.str()});
    out.tables.push_back({"events", ev.str()});
    return out;
}

double profile_min(const OccupationProfile& p) {
    double m = kInf;
    for (const Knot& k : p.knots()) m = std::min(m, k.L);
    return m;
}

// Builds one LRM path, widening the tracked grid when the driver leaves it.
LrmPath build_widening(const BrownianPath& drv, Grid g, const OccupationProfile& profile, double x0,
                       const LrmOptions& opt) {
    for (int w = 0;; ++w, g = g.widened()) {
        LrmPath p = build_lrm(drv, uniform_grid(g.span, g.points), profile, x0, opt);
        const bool range = p.short_path && p.diagnostic.find("tracked range") != std::string::npos;
        if (!range || w == kMaxWidenings) return p;
    }
}

CommandResult lrm_tables(const Cfg& c, const std::vector<LrmPath>& paths) {
    CsvTable pt(header(c, "lrm_path"), {"replica_id", "t", "x"});
    CsvTable sn(header(c, "profile_snapshot"), {"replica_id", "t", "x", "L"});
    std::size_t shorts = 0;
    json diags = json::array();
    for (std::size_t r = 0; r < paths.size(); ++r) {
        const auto rid = static_cast<long long>(r);
        const LrmPath& p = paths[r];
        for (std::size_t k = 0; k < p.t.size(); ++k) pt.row({rid, p.t[k], p.x[k]});
        for (const ProfileSnapshot& s : p.snapshots)
            for (std::size_t i = 0; i < s.x.size(); ++i) sn.row({rid, s.t, s.x[i], s.L[i]});
        shorts += p.short_path ? 1 : 0;
        diags.push_back(p.diagnostic);
    }
    CommandResult out;
    out.summary = {{"command", c.command()}, {"replicas", paths.size()}, {"short_paths", shorts}, {"diagnostics", diags}};
    out.tables.push_back({"path", pt.str()});
    out.tables.push_back({"snapshots", sn.str()});
    return out;
}

CommandResult lrm_build_cmd(Cfg& c) {
    const std::uint64_t seed = c.seed();
    const unsigned threads = c.threads();
    const std::size_t R = c.count("replicas", 1);
    const auto [lo, hi] = c.domain(-16.0, 16.0);
    const OccupationProfile profile = c.profile(lo, hi);
    const double x0 = c.num("x0", 0.0);
    const double du = c.num("du", 1e-4), t_max = c.num("t_max");
    require(du > 0.0, c.field_error("du", "must be positive"));
    require(t_max > 0.0 && std::isfinite(t_max), c.field_error("t_max", "must be positive and finite"));
    // t grows at least as fast as min(L0)^3 u.
    const double u_max = c.num("u_max", t_max / std::pow(profile_min(profile), 3.0) + 2.0 * du);
    const Grid grid = read_grid(c, 4.0, 161);
    LrmOptions opt;
    opt.t_max = t_max;
    opt.snapshot_times = c.list("snapshots");
    c.finish();
    auto paths = parallel_map<LrmPath>(R, threads, [&](std::size_t r) {
        RngStream rng = replica_stream(seed, r, 1);
        return build_widening(brownian_path(du, u_max, rng), grid, profile, x0, opt);
    });
    return lrm_tables(c, paths);
}

CommandResult lrm_rescale_cmd(Cfg& c) {
    const std::uint64_t seed = c.seed();
    const unsigned threads = c.threads();
    const std::size_t R = c.count("replicas", 1);
    const double cc = c.num("c");
    require(cc > 0.0 && std::isfinite(cc), c.field_error("c", "must be positive"));
    const double du = c.num("du", 1e-4), t_max = c.num("t_max");
    require(du > 0.0, c.field_error("du", "must be positive"));
    require(t_max > 0.0 && std::isfinite(t_max), c.field_error("t_max", "must be positive and finite"));
    const Grid grid = read_grid(c, 4.0, 161);
    const double c3 = cc * cc * cc;
    LrmOptions opt;
    opt.t_max = t_max / c3;
    for (double s : c.list("snapshots")) opt.snapshot_times.push_back(s / c3);
    c.finish();
    // Covers the widest grid build_widening can reach.
    const double reach = std::ldexp(grid.span, kMaxWidenings);
    const OccupationProfile unit = OccupationProfile::constant(1.0, -reach, reach);
    auto paths = parallel_map<LrmPath>(R, threads, [&](std::size_t r) {
        RngStream rng = replica_stream(seed, r, 1);
        const LrmPath p = build_widening(brownian_path(du, opt.t_max + 2.0 * du, rng), grid, unit, 0.0, opt);
        return rescale(p, cc);
    });
    return lrm_tables(c, paths);
}

CommandResult lrm_transfer_cmd(Cfg& c) {
    const std::uint64_t seed = c.seed();
    const unsigned threads = c.threads();
    const std::size_t R = c.count("replicas", 1);
    const auto [lo, hi] = c.domain(-16.0, 16.0);
    const OccupationProfile profile = c.profile(lo, hi);
    const double x0 = c.num("x0", 0.0);
    const double du = c.num("du", 1e-4), t_max = c.num("t_max");
    require(du > 0.0, c.field_error("du", "must be positive"));
    require(t_max > 0.0 && std::isfinite(t_max), c.field_error("t_max", "must be positive and finite"));
    const Grid grid = read_grid(c, 4.0, 161);
    c.finish();
    const ScaleTable s0 = scale_s0(profile, x0);
    const OccupationProfile unit = OccupationProfile::constant(1.0, s0.y_lo(), s0.y_hi());
    LrmOptions opt;
    opt.t_max = t_max / std::pow(profile_min(profile), 3.0);
    auto paths = parallel_map<LrmPath>(R, threads, [&](std::size_t r) {
        RngStream rng = replica_stream(seed, r, 1);
        const LrmPath u = build_widening(brownian_path(du, opt.t_max + 2.0 * du, rng), grid, unit, 0.0, opt);
        LrmPath p = transform_profile(u, profile, x0);
        // Keep samples up to the first one at or past the horizon.
        const auto it = std::lower_bound(p.t.begin(), p.t.end(), t_max);
        if (it != p.t.end()) {
            const auto keep = static_cast<std::size_t>(it - p.t.begin()) + 1;
            p.t.resize(keep);
            p.x.resize(keep);
            p.u.resize(keep);
            p.short_path = false;
        } else {
            p.short_path = true;
            if (p.diagnostic.empty()) p.diagnostic = "driver exhausted before the t horizon";
        }
        return p;
    });
    return lrm_tables(c, paths);
}

CommandResult verify_cmd(const std::string& suite, const json& config) {
    json cfg = config.is_null() ? json::object() : config;
    require(cfg.is_object(), "verify: config must be a JSON object");
    std::uint64_t seed = 1;
    unsigned threads = 0;
    if (cfg.contains("seed")) {
        require(cfg["seed"].is_number_integer() && cfg["seed"].get<long long>() >= 0,
                "verify: field 'seed' must be a non-negative integer");
        seed = cfg["seed"].get<std::uint64_t>();
        cfg.erase("seed");
    }
    if (cfg.contains("threads")) {
        require(cfg["threads"].is_number_integer() && cfg["threads"].get<long>() >= 0,
                "verify: field 'threads' must be a non-negative integer");
        threads = static_cast<unsigned>(cfg["threads"].get<long>());
        cfg.erase("threads");
    }
    const TestReport rep = run_suite(suite, cfg, seed, threads);
    CommandResult out;
    out.summary = rep.to_json();
    out.pass = rep.pass();
    return out;
}

using Handler = CommandResult (*)(Cfg&);

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> h = {
        {"simulate vrjp", simulate_vrjp_cmd}, {"simulate errw", simulate_errw_cmd},
        {"simulate envdiff", simulate_envdiff_cmd}, {"env sample", env_sample_cmd},
        {"flow run", flow_run_cmd}, {"lrm build", lrm_build_cmd},
        {"lrm rescale", lrm_rescale_cmd}, {"lrm transfer", lrm_transfer_cmd},
    };
    return h;
}

}  // namespace

const char* library_version() { return "1.0.0"; }

std::vector<std::string> command_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : handlers()) out.push_back(k);
    for (const auto& s : suite_names()) out.push_back("verify " + s);
    return out;
}

CommandResult run_command(const std::string& command, const json& config) {
    if (command.rfind("verify ", 0) == 0) return verify_cmd(command.substr(7), config);
    const auto it = handlers().find(command);
    if (it == handlers().end()) fail_invalid("unknown command '" + command + "'");
    Cfg c(command, config);
    return it->second(c);
}

}  // namespace lrmsim
