#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace basinlab {

/// Runs one basinlab subcommand. `args` excludes the program name.
/// Exit codes: 0 success, 1 usage error, 2 precondition error, 3 numerical failure.
int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace basinlab
