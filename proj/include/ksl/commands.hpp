#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ksl/scenario.hpp"

namespace ksl {

struct CliOptions {
    std::optional<double> tol;
    std::optional<int> max_level;
    std::optional<std::string> direction;
    std::optional<int> depth;
    std::optional<int> sample;
    std::optional<double> divergence_bound;
};

struct CommandOutput {
    nlohmann::json result;
    int exit_code = 0;
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
};

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitNonconverged = 2, kExitDiverging = 3 };

const std::vector<std::string>& command_names();
int exit_code_for(Verdict v);

// scenario may be absent only for selftest
CommandOutput run(const std::string& command, const std::optional<Scenario>& scenario, const CliOptions& opts);

// whole program: argument parsing, I/O, error mapping
int cli_main(int argc, char** argv);

}  // namespace ksl
