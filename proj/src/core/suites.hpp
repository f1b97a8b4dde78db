#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

namespace lrmsim {

// exact: p-value against alpha for identities that hold in law at fixed mesh.
// band: distance against a tolerance for mesh-limited comparisons.
// deterministic: numerical error against a tolerance.
// info: reported only.
struct SuiteStatistic {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation;  // "<", ">", "in" (threshold..threshold_hi) or "info"
    std::string regime;
    bool pass = true;
    double threshold_hi = 0.0;
};

struct TestReport {
    std::string suite;
    nlohmann::json params;
    std::vector<SuiteStatistic> statistics;
    std::vector<std::uint64_t> seeds;
    double runtime_s = 0.0;
    bool gating = true;
    bool pass() const;
    nlohmann::json to_json() const;
};

const std::vector<std::string>& suite_names();
nlohmann::json suite_defaults(const std::string& name);
// config keys override the suite defaults; unknown keys are rejected.
TestReport run_suite(const std::string& name, const nlohmann::json& config, std::uint64_t seed, unsigned threads = 0);

}  // namespace lrmsim
