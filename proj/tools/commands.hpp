#pragma once

namespace neglectnet::cli {

/// Entry point of the `neglectnet` tool; returns the process exit code:
/// 0 success, 1 failed check, 2 usage or configuration error,
/// 3 numeric divergence, 4 file error.
int run(int argc, char** argv);

}  // namespace neglectnet::cli
