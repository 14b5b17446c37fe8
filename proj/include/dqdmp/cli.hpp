#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dqdmp {

/// Runs the `dqdmp` command line. `args` excludes the program name. Data go
/// to `out` unless an output path is given; diagnostics go to `err`.
/// Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace dqdmp
