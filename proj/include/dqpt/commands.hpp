#pragma once

#include <string>
#include <vector>

#include "dqpt/critical.hpp"
#include "dqpt/entanglement.hpp"
#include "dqpt/io.hpp"

namespace dqpt {

/// Subcommand names accepted by run_command.
const std::vector<std::string>& command_names();

/// Runs one subcommand. Every command except `check` needs cfg.quench.
OutputTable run_command(const std::string& cmd, const RunConfig& cfg);

/// Grid matching the configuration and quench dimension.
BrillouinGrid config_grid(const RunConfig& cfg, const QuenchSpec& q);

struct CheckResult {
    std::string quench;
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Oracle/invariant suite for one quench.
std::vector<CheckResult> run_checks(const std::string& label, const QuenchSpec& q, const RunConfig& cfg);

/// The benchmark quenches used by `check` when no model is configured.
std::vector<std::pair<std::string, QuenchSpec>> benchmark_quenches();

}  // namespace dqpt
