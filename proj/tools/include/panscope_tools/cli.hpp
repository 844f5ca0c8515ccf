#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace panscope::cli {

enum ExitCode : int { ok = 0, usage = 1, data = 2 };

/// Runs one `panscope` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

} // namespace panscope::cli
