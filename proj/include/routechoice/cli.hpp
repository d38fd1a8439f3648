#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace routechoice {

// Entry point of the `routechoice` binary. args excludes the program name.
// Returns 0 on success, 1 on bad input data or configuration, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace routechoice
