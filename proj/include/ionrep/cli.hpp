#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ionrep {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitInvalid = 1,   // configuration, validation or compute error
    kExitUsage = 2,     // unknown subcommand or flag
    kExitZeroKey = 3,   // result carries no secret key
    kExitIo = 4,
};

/// Runs one subcommand (rate, sweep, optimize, benchmark, simulate).
/// args excludes the program name. Reports go to `out` unless --out is
/// given; diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ionrep
