#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kronlow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name. Primary output written to "-" goes to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kronlow::cli
