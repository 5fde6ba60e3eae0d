#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dbc::cli {

/// Runs one `dbc` invocation. `args` excludes the program name. Returns the process
/// exit code: 0 success, 1 usage, 2 data or contract, 3 numerical.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Default for --workers: DBC_WORKERS if set, else 1.
unsigned default_workers();

inline constexpr const char* kWorkersEnv = "DBC_WORKERS";
inline constexpr const char* kManifestFormat = "dbc-manifest/1";
inline constexpr const char* kReportFormat = "dbc-compare/1";

}  // namespace dbc::cli
