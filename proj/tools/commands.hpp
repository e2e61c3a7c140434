#pragma once

#include <string>
#include <vector>

namespace tactile::cli {

inline constexpr int kReportSchemaVersion = 1;

// Runs the `tactile` command line (args excludes the program name) and
// returns the process exit code: 0 ok, 2 input, 3 numerical, 4 I/O.
int run(const std::vector<std::string>& args);

}  // namespace tactile::cli
