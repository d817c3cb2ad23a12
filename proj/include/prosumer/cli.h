#pragma once

#include <ostream>

namespace prosumer {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point for the prosumer command-line tool. Subcommands:
// gen-scenario, cutoffs, simulate, fit, report.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace prosumer
