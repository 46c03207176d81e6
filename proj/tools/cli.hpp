#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace privcap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

inline constexpr int kReportFormatVersion = 1;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "PRIVCAP_OUT_DIR";

/// Runs one command. `args` excludes the program name. The JSON report goes
/// to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace privcap::cli
