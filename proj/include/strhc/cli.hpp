#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace strhc::cli {

// Command-line front end. args excludes the program name. Returns the
// process exit status: 0 on success, 1 on a runtime failure (reported as a
// JSON diagnostic on out), 2 on a usage error.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace strhc::cli
