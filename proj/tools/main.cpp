// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cli.hpp"

int main(int argc, char** argv) {
  return tap::cli::Run(std::vector<std::string>(argv + 1, argv + argc));
}
