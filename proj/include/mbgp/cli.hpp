#pragma once

#include <iosfwd>

namespace mbgp {

/// Entry point of the command-line tool. Returns the process exit code:
/// 0 success, 2 invalid input, 3 numerical failure, 4 I/O failure.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace mbgp
