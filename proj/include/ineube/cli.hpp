// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INEUBE_CLI_HPP_
#define INEUBE_CLI_HPP_

#include <ostream>

namespace ineube {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // I/O and runtime failures
inline constexpr int kExitUsage = 2;    // bad flags, arguments or config

// Entry point of the `ineube` tool. Subcommands: simulate, enhance, sweep,
// evaluate, fit-ridge.
int CliMain(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ineube

#endif  // INEUBE_CLI_HPP_
