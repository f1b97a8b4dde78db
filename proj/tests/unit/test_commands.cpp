#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "commands.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "suites.hpp"

using namespace lrmsim;
using json = nlohmann::json;

namespace {

std::string message_of(const std::string& cmd, const json& cfg) {
    try {
        run_command(cmd, cfg);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

const std::string& table(const CommandResult& r, const std::string& name) {
    for (const auto& t : r.tables)
        if (t.name == name) return t.csv;
    FAIL("missing table " << name);
    static const std::string none;
    return none;
}

}  // namespace

TEST_CASE("csv formatting round-trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789, 0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CsvTable t(R"({"a":1})", {"id", "x", "tag"});
    t.row({7LL, 0.5, std::string("k")});
    CHECK(t.str() == "# {\"a\":1}\nid,x,tag\n7,0.5,k\n");
    CHECK_THROWS_AS(t.row({1LL}), Error);
    const CsvData d = parse_csv(t.str());
    CHECK(d.header_json == R"({"a":1})");
    CHECK(d.column("x") == 1);
    CHECK(d.number(0, 1) == 0.5);
    CHECK_THROWS_AS(d.column("nope"), Error);
    CHECK_THROWS_AS(d.number(0, 2), Error);
}

TEST_CASE("commands: field validation names the field") {
    CHECK(message_of("simulate vrjp", {{"n", 4}, {"t_max", 1.0}}).find("'profile'") != std::string::npos);
    CHECK(message_of("simulate vrjp", {{"n", 4}, {"t_max", 1.0}, {"profile", "unit"}, {"tmax", 2}})
              .find("'tmax'") != std::string::npos);
    CHECK(message_of("simulate vrjp", {{"n", "x"}, {"t_max", 1.0}, {"profile", "unit"}}).find("'n'") !=
          std::string::npos);
    CHECK(message_of("simulate vrjp", {{"n", 4}, {"t_max", 1.0}, {"profile", "spiky"}}).find("'profile'") !=
          std::string::npos);
    CHECK(message_of("launch", json::object()).find("unknown command") != std::string::npos);
    CHECK(message_of("verify nope", json::object()).find("unknown suite") != std::string::npos);
    CHECK_THROWS_AS(run_command("simulate envdiff", {{"m", 4}, {"profile", "unit"}}), Error);
}

TEST_CASE("commands: outputs are deterministic and independent of threads") {
    const json cfg = {{"n", 5}, {"t_max", 0.5}, {"profile", "unit"}, {"domain", {-4, 4}}, {"replicas", 5}, {"seed", 3}};
    json c1 = cfg, c3 = cfg;
    c1["threads"] = 1;
    c3["threads"] = 3;
    const auto a = run_command("simulate vrjp", c1);
    const auto b = run_command("simulate vrjp", c3);
    REQUIRE(a.tables.size() == 2);
    CHECK(a.tables[0].csv == b.tables[0].csv);
    CHECK(a.tables[1].csv == b.tables[1].csv);
    const CsvData d = parse_csv(table(a, "trajectory"));
    CHECK(d.columns == std::vector<std::string>{"replica_id", "time", "site"});
    const json h = json::parse(d.header_json);
    CHECK(h["config"]["seed"] == 3);
    CHECK(h["config"]["t_max"] == 0.5);
    CHECK(!h["config"].contains("threads"));
    const CsvData lt = parse_csv(table(a, "local_time"));
    CHECK(lt.columns == std::vector<std::string>{"replica_id", "site", "time", "L"});
    for (std::size_t i = 0; i < lt.rows.size(); ++i) CHECK(lt.number(i, 3) >= 1.0);
}

TEST_CASE("commands: ERRW local time counts steps of length 4^-n") {
    const auto r = run_command("simulate errw", {{"n", 3}, {"steps", 200}, {"domain", {-20, 20}}});
    const CsvData lt = parse_csv(table(r, "local_time"));
    double excess = 0.0;
    for (std::size_t i = 0; i < lt.rows.size(); ++i) excess += lt.number(i, 3) - 1.0;
    // Sum of (L - L0) times the site width is the elapsed time.
    CHECK(excess / 8.0 == doctest::Approx(200.0 / 64.0));
}

TEST_CASE("commands: a sampled environment drives quenched runs") {
    const std::string path = "test_commands_env.csv";
    const json base = {{"profile", "unit"}, {"domain", {-2, 2}}, {"seed", 4}};
    json ecfg = base;
    ecfg["n"] = 5;
    const auto env = run_command("env sample", ecfg);
    {
        std::ofstream f(path, std::ios::binary);
        f << table(env, "environment");
    }
    json q = base;
    q["m"] = 5;
    q["t_max"] = 0.2;
    q["replicas"] = 3;
    q["quenched"] = path;
    const auto quenched = run_command("simulate envdiff", q);
    const auto h = env.summary["env_hash"];
    for (const auto& v : quenched.summary["env_hashes"]) CHECK(v == h);
    // Replica 0 of an annealed run with the same seed samples the same environment.
    q.erase("quenched");
    q["replicas"] = 1;
    const auto annealed = run_command("simulate envdiff", q);
    CHECK(annealed.summary["env_hashes"][0] == h);
    std::remove(path.c_str());

    json bad = base;
    bad["n"] = 5;
    bad["kind"] = "discrete";
    const auto d = run_command("env sample", bad);
    CHECK(parse_csv(table(d, "environment")).columns == std::vector<std::string>{"site", "x", "U"});
}

TEST_CASE("commands: flow and lrm tables") {
    const auto f = run_command("flow run", {{"du", 1e-3}, {"u_max", 0.2}, {"span", 2}, {"points", 41}});
    const CsvData cp = parse_csv(table(f, "checkpoints"));
    CHECK(cp.rows.size() == 2 * 41);
    CHECK(cp.columns == std::vector<std::string>{"replica_id", "u", "index", "y", "Psi", "Lcal", "Lambda"});
    const CsvData ev = parse_csv(table(f, "events"));
    CHECK(ev.columns == std::vector<std::string>{"replica_id", "u_event", "y_index", "kind"});

    // A narrow grid is widened until the driver stays inside.
    const auto w = run_command("flow run", {{"du", 1e-3}, {"u_max", 1.0}, {"span", 0.05}, {"points", 3}, {"seed", 2}});
    CHECK(w.summary["grid_span"][0].get<double>() > 0.05);

    const auto l = run_command("lrm build", {{"profile", "unit"}, {"t_max", 0.5}, {"du", 1e-3}, {"snapshots", {0.25}}});
    CHECK(l.summary["short_paths"] == 0);
    const CsvData p = parse_csv(table(l, "path"));
    CHECK(p.number(p.rows.size() - 1, 1) >= 0.5);
    const CsvData s = parse_csv(table(l, "snapshots"));
    CHECK(s.columns == std::vector<std::string>{"replica_id", "t", "x", "L"});
    CHECK(s.rows.size() > 0);

    // Rescaling by c maps the horizon t / c^3 of the unit path to t.
    const auto r = run_command("lrm rescale", {{"c", 2.0}, {"t_max", 0.8}, {"du", 1e-3}});
    const CsvData rp = parse_csv(table(r, "path"));
    CHECK(rp.number(rp.rows.size() - 1, 1) >= 0.8);
    const auto t = run_command("lrm transfer", {{"profile", "ramp"}, {"t_max", 0.3}, {"du", 1e-3}});
    const CsvData tp = parse_csv(table(t, "path"));
    CHECK(tp.number(tp.rows.size() - 1, 1) >= 0.3);
}

TEST_CASE("suites: registry and parameter validation") {
    CHECK(suite_names().size() == 12);
    for (const auto& s : suite_names()) CHECK(suite_defaults(s).is_object());
    CHECK_THROWS_AS(run_suite("nope", json::object(), 1), Error);
    CHECK_THROWS_AS(run_suite("qv", {{"bogus", 1}}, 1), Error);
    const json small = {{"draws", 4096}, {"K_gauss", 64}};
    auto a = run_suite("sampler-moments", small, 2, 1).to_json();
    auto b = run_suite("sampler-moments", small, 2, 2).to_json();
    a.erase("runtime_s");
    b.erase("runtime_s");
    CHECK(a == b);
    CHECK(a["suite"] == "sampler-moments");
    CHECK(a["statistics"].is_array());
}

TEST_CASE("verify command reports pass and fail") {
    const auto ok = run_command("verify flow-oracles", {{"drivers", 3}, {"restart_drivers", 2}, {"seed", 1}});
    CHECK(ok.pass);
    const auto bad = run_command("verify sampler-moments", {{"draws", 1000}, {"K_gauss", 64}});
    CHECK(!bad.pass);
    CHECK(bad.summary["seeds"][0] == 1);
}
