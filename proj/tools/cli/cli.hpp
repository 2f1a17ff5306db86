// Copyright 2026 The replay-opt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace replay_opt::cli {

/// Process exit codes; stable values scripts may rely on.
enum ExitCode : int {
  kExitOk = 0,
  kExitPartialFailure = 1,
  kExitConfigError = 2,
  kExitNumericFault = 3,
  kExitGradcheckFailed = 4,
};

/// Entry point behind the `replay-opt` binary. `args` excludes the program
/// name. Normal output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace replay_opt::cli
