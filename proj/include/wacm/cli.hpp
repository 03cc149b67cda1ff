// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wacm::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kValidation = 2,
  kIo = 3,
  kNumerical = 4,
};

/// Runs one `wacm` command. `args` excludes the program name, e.g.
/// {"dwt", "in.ppm", "out.wacm"}. Diagnostics go to `err`, tabular output
/// (metrics) to `out`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace wacm::cli
