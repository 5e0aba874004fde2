#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace memeattr::cli {

/// "memeattr <version> (build <id>), index format <n>".
std::string version_string();

/// Runs one command line (without the program name). Data goes to `out`,
/// usage text and errors to `err`; log lines go to stderr.
///
/// Exit codes: 0 success, 1 usage error, 2 data error, 3 model or transport
/// error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace memeattr::cli
