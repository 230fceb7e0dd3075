#ifndef CARNOT_TOOLS_CLI_APP_HPP
#define CARNOT_TOOLS_CLI_APP_HPP

#include <ostream>

#include "carnot/group_io.hpp"

namespace carnot_cli {

/// Runs the command line tool in-process. argv follows main() conventions
/// (argv[0] is the program name). Exit codes: 0 success, 1 a `verify`
/// property failed, 2 input error, 3 convergence error.
int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

/// Invariant suite behind the `verify` subcommand: prints one pass/fail line
/// per property and returns the number of failures.
int verify_group(const carnot::GroupHandle& handle, std::ostream& out);

}  // namespace carnot_cli

#endif
