#include <cstdio>
#include <fstream>
#include <iostream>
#include <list>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lrmsim/lrmsim.h"

using json = nlohmann::json;

namespace {

enum class Kind { Number, Integer, String, Profile, List };

struct Field {
    CLI::App* app;
    CLI::Option* opt;
    std::string key;
    Kind kind;
    std::vector<std::string> raw;
};

struct Leaf {
    CLI::App* app;
    std::string command;
    std::string out;
    std::string config_file;
};

class Cli {
public:
    std::list<Field> fields;
    std::list<Leaf> leaves;

    Leaf& leaf(CLI::App* parent, const std::string& name, const std::string& command, const std::string& help) {
        CLI::App* app = parent->add_subcommand(name, help);
        leaves.push_back({app, command, "", ""});
        Leaf& l = leaves.back();
        app->add_option("--out", l.out, "Output path prefix (verify: report file)");
        app->add_option("--config", l.config_file, "JSON config file; explicit flags override its values");
        add(app, "--seed", "seed", Kind::Integer, "Master seed");
        add(app, "--threads", "threads", Kind::Integer, "Worker threads (0: all cores)");
        return l;
    }

    void add(CLI::App* app, const std::string& flag, const std::string& key, Kind kind, const std::string& help) {
        fields.push_back({app, nullptr, key, kind, {}});
        Field& f = fields.back();
        f.opt = app->add_option(flag, f.raw, help);
        if (kind == Kind::List) f.opt->expected(1, -1);
        else f.opt->expected(1);
    }
};

json convert(const Field& f) {
    const std::string& s = f.raw.front();
    const std::string flag = f.opt->get_name();
    try {
        std::size_t used = 0;
        switch (f.kind) {
            case Kind::Integer: {
                const long long v = std::stoll(s, &used);
                if (used != s.size()) break;
                return v;
            }
            case Kind::Number: {
                const double v = std::stod(s, &used);
                if (used != s.size()) break;
                return v;
            }
            case Kind::String: return s;
            case Kind::Profile: {
                if (!s.empty() && s.front() == '{') return json::parse(s);
                try {
                    const double v = std::stod(s, &used);
                    if (used == s.size()) return v;
                } catch (const std::exception&) {
                }
                return s;
            }
            case Kind::List: {
                json a = json::array();
                for (const std::string& e : f.raw) {
                    const double v = std::stod(e, &used);
                    if (used != e.size()) throw std::invalid_argument(e);
                    a.push_back(v);
                }
                return a;
            }
        }
    } catch (const std::exception&) {
    }
    throw CLI::ValidationError(flag, "invalid value '" + s + "'");
}

json load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
    json j = json::parse(f);
    if (!j.is_object()) throw std::runtime_error("config file '" + path + "' must hold a JSON object");
    return j;
}

bool write_file(const std::string& path, const char* data, std::size_t len) {
    std::ofstream f(path, std::ios::binary);
    f.write(data, static_cast<std::streamsize>(len));
    return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation toolkit for reinforced walks, random environments and the local-time flow"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(lrm_version()));
    Cli cli;

    CLI::App* simulate = app.add_subcommand("simulate", "Simulate a lattice process")->require_subcommand(1);
    auto lattice_common = [&](CLI::App* a) {
        cli.add(a, "--profile", "profile", Kind::Profile, "Initial profile: unit|ramp|bump, a constant, a JSON file or object");
        cli.add(a, "--domain", "domain", Kind::List, "Domain bounds: lo hi");
        cli.add(a, "--replicas", "replicas", Kind::Integer, "Independent replicas");
    };
    {
        Leaf& l = cli.leaf(simulate, "vrjp", "simulate vrjp", "Vertex-reinforced jump process");
        lattice_common(l.app);
        cli.add(l.app, "--n", "n", Kind::Integer, "Lattice exponent: mesh 2^-n");
        cli.add(l.app, "--t-max", "t_max", Kind::Number, "Time horizon");
    }
    {
        Leaf& l = cli.leaf(simulate, "errw", "simulate errw", "Edge-reinforced random walk");
        lattice_common(l.app);
        cli.add(l.app, "--n", "n", Kind::Integer, "Lattice exponent: mesh 2^-n");
        cli.add(l.app, "--steps", "steps", Kind::Integer, "Number of steps");
    }
    {
        Leaf& l = cli.leaf(simulate, "envdiff", "simulate envdiff", "Jump process in a continuous random environment");
        lattice_common(l.app);
        cli.add(l.app, "--m", "m", Kind::Integer, "Mesh exponent: mesh 2^-m");
        cli.add(l.app, "--t-max", "t_max", Kind::Number, "Horizon in the reinforced clock");
        cli.add(l.app, "--q-max", "q_max", Kind::Number, "Horizon in the environment clock");
        cli.add(l.app, "--u-max", "u_max", Kind::Number, "Horizon in the reduced clock");
        cli.add(l.app, "--clock", "clock", Kind::String, "Output clock: t, q or u");
        cli.add(l.app, "--quenched", "quenched", Kind::String, "Environment CSV shared by all replicas");
    }
    CLI::App* env = app.add_subcommand("env", "Random environments")->require_subcommand(1);
    {
        Leaf& l = cli.leaf(env, "sample", "env sample", "Sample one environment");
        cli.add(l.app, "--profile", "profile", Kind::Profile, "Initial profile");
        cli.add(l.app, "--domain", "domain", Kind::List, "Domain bounds: lo hi");
        cli.add(l.app, "--kind", "kind", Kind::String, "discrete, gamma or continuous");
        cli.add(l.app, "--n", "n", Kind::Integer, "Lattice exponent");
    }
    CLI::App* flow = app.add_subcommand("flow", "Local-time flow")->require_subcommand(1);
    {
        Leaf& l = cli.leaf(flow, "run", "flow run", "Integrate the flow along Brownian drivers");
        cli.add(l.app, "--replicas", "replicas", Kind::Integer, "Independent drivers");
        cli.add(l.app, "--du", "du", Kind::Number, "Driver step");
        cli.add(l.app, "--u-max", "u_max", Kind::Number, "Driver horizon");
        cli.add(l.app, "--span", "span", Kind::Number, "Tracked points cover [-span, span]");
        cli.add(l.app, "--points", "points", Kind::Integer, "Number of tracked points");
        cli.add(l.app, "--checkpoint-every", "checkpoint_every", Kind::Integer, "Driver steps between checkpoints");
    }
    CLI::App* lrm = app.add_subcommand("lrm", "Local-time reinforced motion")->require_subcommand(1);
    auto lrm_common = [&](CLI::App* a) {
        cli.add(a, "--replicas", "replicas", Kind::Integer, "Independent replicas");
        cli.add(a, "--du", "du", Kind::Number, "Driver step");
        cli.add(a, "--t-max", "t_max", Kind::Number, "Time horizon");
        cli.add(a, "--span", "span", Kind::Number, "Tracked points cover [-span, span]");
        cli.add(a, "--points", "points", Kind::Integer, "Number of tracked points");
    };
    {
        Leaf& l = cli.leaf(lrm, "build", "lrm build", "Build paths from Brownian drivers");
        lrm_common(l.app);
        cli.add(l.app, "--profile", "profile", Kind::Profile, "Initial profile");
        cli.add(l.app, "--domain", "domain", Kind::List, "Domain bounds: lo hi");
        cli.add(l.app, "--x0", "x0", Kind::Number, "Start point");
        cli.add(l.app, "--u-max", "u_max", Kind::Number, "Driver horizon");
        cli.add(l.app, "--snapshots", "snapshots", Kind::List, "Times of profile snapshots");
    }
    {
        Leaf& l = cli.leaf(lrm, "rescale", "lrm rescale", "Rescaled unit-profile paths (profile c)");
        lrm_common(l.app);
        cli.add(l.app, "--c", "c", Kind::Number, "Scale factor");
        cli.add(l.app, "--snapshots", "snapshots", Kind::List, "Times of profile snapshots");
    }
    {
        Leaf& l = cli.leaf(lrm, "transfer", "lrm transfer", "Unit-profile paths mapped to another profile");
        lrm_common(l.app);
        cli.add(l.app, "--profile", "profile", Kind::Profile, "Target profile");
        cli.add(l.app, "--domain", "domain", Kind::List, "Domain bounds: lo hi");
        cli.add(l.app, "--x0", "x0", Kind::Number, "Start point");
    }
    std::string suite;
    std::vector<std::string> params;
    {
        Leaf& l = cli.leaf(&app, "verify", "verify", "Run a verification suite");
        l.app->add_option("suite", suite, "Suite name")->required();
        l.app->add_option("--param", params, "Suite parameter key=value (value is JSON)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const Leaf* chosen = nullptr;
    for (const Leaf& l : cli.leaves)
        if (l.app->parsed()) chosen = &l;
    if (!chosen) return 2;
    const bool verify = chosen->command == "verify";
    const std::string command = verify ? "verify " + suite : chosen->command;

    json config = json::object();
    try {
        if (!chosen->config_file.empty()) config = load_config(chosen->config_file);
        for (const std::string& p : params) {
            const auto eq = p.find('=');
            if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--param", "expected key=value, got '" + p + "'");
            const std::string value = p.substr(eq + 1);
            json v;
            try {
                v = json::parse(value);
            } catch (const json::exception&) {
                v = value;
            }
            config[p.substr(0, eq)] = v;
        }
        for (const Field& f : cli.fields)
            if (f.app == chosen->app && f.opt->count() > 0) config[f.key] = convert(f);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    lrm_result* res = nullptr;
    const lrm_status st = lrm_run(command.c_str(), config.dump().c_str(), &res);
    if (st != LRM_OK) {
        std::cerr << "error: " << lrm_last_error() << "\n";
        return st == LRM_INVALID_PARAMETER ? 2 : 3;
    }

    int code = 0;
    const std::string summary = lrm_result_summary(res);
    if (verify) {
        const std::string pretty = json::parse(summary).dump(2) + "\n";
        if (!chosen->out.empty() && !write_file(chosen->out, pretty.data(), pretty.size())) {
            std::cerr << "error: cannot write '" << chosen->out << "'\n";
            code = 3;
        }
        std::cout << pretty;
        if (code == 0) code = lrm_result_passed(res) ? 0 : 1;
    } else {
        const std::string prefix = chosen->out.empty() ? "lrmsim" : chosen->out;
        json written = json::array();
        for (std::size_t i = 0; i < lrm_result_table_count(res); ++i) {
            std::size_t len = 0;
            const char* data = lrm_result_table_csv(res, i, &len);
            const std::string path = prefix + "." + lrm_result_table_name(res, i) + ".csv";
            if (!write_file(path, data, len)) {
                std::cerr << "error: cannot write '" << path << "'\n";
                code = 3;
                break;
            }
            written.push_back(path);
        }
        json s = json::parse(summary);
        s["files"] = written;
        std::cout << s.dump() << "\n";
    }
    lrm_result_free(res);
    return code;
}
