#pragma once

#include "strato/errors.hpp"

namespace strato {

inline constexpr const char* kCliVersion = "0.1.0";

// Exit code categories: 0 success, 2 unreadable or malformed input (config,
// referenced files, usage), 3 validated-but-rejected parameters or resolution,
// 4 numerical failure at run time.
int exit_code_for(ErrorCode code);

// Full command-line entry point:
//   strato <modes|mixing|simulate|sharp-limit> --config <file.json> [--out <dir>]
// Parses the single JSON config (unknown keys are rejected), runs the command,
// writes its CSV products plus a manifest.json capturing the fully resolved
// configuration and every numerical convention, and returns the process exit
// code. Identical configs produce byte-identical output files.
int run_cli(int argc, const char* const* argv);

}  // namespace strato
