#pragma once

// Command-line driver. Subcommands: validate, stationary, simulate, limit,
// verify, replay. Exit codes: 0 success, 1 validation failure (including
// model-file errors and replay mismatches), 2 runtime error or bad usage.

#include <iosfwd>
#include <string>
#include <vector>

namespace mmjump {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmjump
