#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace framelayout {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;       // bad arguments or I/O failure
inline constexpr int kExitInfeasible = 2;  // room too small or optimizer divergence
inline constexpr int kExitInvalid = 3;     // scene validation or revision failure

inline constexpr const char* kSeedEnvVar = "FRAMELAYOUT_SEED";

/// Runs one command line (without the program name). Results go to `out`;
/// errors go to `err` as one JSON object per line, followed by usage text
/// for argument errors.
int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace framelayout
