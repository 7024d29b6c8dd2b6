#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kvplate {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_numerical = 2 };

/// kv-plate-lab entry point. args excludes the program name. Subcommands:
/// model, simulate, spectrum, resolvent, carleman, weights, report.
/// Returns 0 on success, 1 on invalid input (usage or field message on err),
/// 2 on numerical failure (message on err plus a JSON diagnostic file).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kvplate
