#pragma once

#include <iosfwd>

namespace mabsoc {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidationFailed = 2;

// Entry point of `mabsim`: run | compare | sweep-wl | rimab | validate.
int parse_and_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mabsoc
