#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace driftguard::cli {

/// Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point for the `driftguard` tool. `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace driftguard::cli
