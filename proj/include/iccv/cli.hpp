#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace iccv {

// Parses argv (without the program name), dispatches to the library, and
// writes CSV or JSON rows to stdout (or --out). The fully resolved
// configuration is echoed to stderr as a config file that reproduces the run
// via --config. Returns 0 on success, 1 on computation errors, 2 on usage
// errors.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace iccv
