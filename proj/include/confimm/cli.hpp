#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace confimm {

/// Command-line entry point. Exit codes: 0 when every check passes, 1 when a
/// check fails, 2 on invalid input.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace confimm
