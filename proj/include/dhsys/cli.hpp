// Command-line surface. Exit codes: 0 pass, 1 mathematical failure, 2 I/O,
// parse or usage error.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dhsys {

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dhsys
