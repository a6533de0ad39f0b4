#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rfdfar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Runs one `rfdfar` invocation. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rfdfar::cli
