#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace aoicache::cli {

enum ExitCode { ok = 0, failure = 1, usage = 2, intractable = 3, divergence = 4 };

/// Entry point behind the `aoicache` executable. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aoicache::cli
