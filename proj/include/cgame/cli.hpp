#pragma once

#include "cgame/diffusion.hpp"
#include "cgame/impulse.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cgame::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

/// Rounds to 12 significant digits, the precision of every emitted number.
double round12(double v);

/// Equilibrium record with the inputs needed to re-validate it.
nlohmann::json equilibrium_to_json(const MixedEquilibrium& eq, const ModelParams& params);

/// Inverse of equilibrium_to_json. Throws ConfigError on missing or
/// mistyped keys.
MixedEquilibrium equilibrium_from_json(const nlohmann::json& doc, ModelParams& params);

/// Error document {error: {condition, message}}.
nlohmann::json error_json(const std::string& condition, const std::string& message);

/// Runs the tool on `args` (args[0] is the program name), writing the main
/// document to `out` and diagnostics to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cgame::cli
