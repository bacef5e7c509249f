#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace linmeas::cli {

enum ExitCode : int { kOk = 0, kInvalid = 2, kRelationViolation = 3, kOracleFailure = 4 };

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "LINMEAS_OUT_DIR";

/// Runs the command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace linmeas::cli
