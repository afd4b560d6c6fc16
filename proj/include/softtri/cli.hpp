#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace softtri::cli {

/// Runs one command line (arguments after the program name). Returns the
/// process exit code: 0 success, 2 usage or validation error, 1 internal.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Stops a running `serve` command, if any.
void request_shutdown();

} // namespace softtri::cli
