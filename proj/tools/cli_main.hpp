#pragma once

#include <string>
#include <vector>

namespace autospec {

// Full CLI entry point. args[0] is the program name, the rest are the
// command line. Returns the process exit code: 0 success, 1 usage error,
// 2 runtime failure.
int cli_main(std::vector<std::string> args);

}  // namespace autospec
