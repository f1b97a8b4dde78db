#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace lrmsim {

struct OutputTable {
    std::string name;  // file suffix, e.g. "trajectory"
    std::string csv;
};

struct CommandResult {
    std::vector<OutputTable> tables;
    nlohmann::json summary;  // run facts, or the verification report
    bool pass = true;        // verification outcome; true for other commands
};

// Commands: "simulate vrjp", "simulate errw", "simulate envdiff", "env sample", "flow run",
// "lrm build", "lrm rescale", "lrm transfer", "verify <suite>".
// Missing or unknown config fields raise InvalidParameter naming the field.
CommandResult run_command(const std::string& command, const nlohmann::json& config);

std::vector<std::string> command_names();
const char* library_version();

}  // namespace lrmsim
