#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ramlift::cli {

// Parses and executes one command line (without the program name).
// Returns the process exit status: 0 when every requested verification
// passed, 1 on a failed verification, 2 on usage/configuration errors,
// 3 when a search ended without a certificate (budget exhausted).
int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace ramlift::cli
