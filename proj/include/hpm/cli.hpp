#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hpm {

/// Entry point of the `hpm` tool. `args` excludes the program name.
/// Exit codes: 0 ok, 1 usage, 2 parse/heuristic/config errors, 3 export errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hpm
