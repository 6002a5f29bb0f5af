#pragma once

#include <iosfwd>

namespace nsbench {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;       // bad arguments or infeasible targets
inline constexpr int kExitRunFailed = 3;   // more than half of the queries failed
inline constexpr int kExitIntegrity = 4;   // dataset / run / corpus hash mismatch

// Entry point of the nsbench command line tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace nsbench
