// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAP_TOOLS_CLI_HPP_
#define TAP_TOOLS_CLI_HPP_

#include <string>
#include <vector>

namespace tap::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitPartial = 2,
  kExitIntegrity = 3,
};

// Runs one tapkit invocation; args excludes the program name.
int Run(const std::vector<std::string>& args);

}  // namespace tap::cli

#endif  // TAP_TOOLS_CLI_HPP_
