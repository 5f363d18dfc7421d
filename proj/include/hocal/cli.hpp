#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hocal {

/// Runs one `hocal` subcommand. `args` excludes the program name. Main
/// outputs go to the --out path when given, otherwise to `out`; a one-line
/// JSON summary goes to `out` after a file write. Errors print a one-line JSON
/// diagnostic to `err`.
///
/// Exit codes: 0 success, 1 module error, 2 usage error.
int run_pipeline(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hocal
