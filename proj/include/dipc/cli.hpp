#pragma once

namespace dipc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitIoError = 3;

// Full command-line front end (subcommands: bounds | pack | simulate |
// verify). Returns the process exit status instead of calling exit(), so
// tests can drive it in-process.
int run(int argc, const char* const* argv);

}  // namespace dipc::cli
