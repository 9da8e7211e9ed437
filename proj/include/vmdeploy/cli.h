// Copyright 2026 The vmdeploy Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VMDEPLOY_CLI_H_
#define VMDEPLOY_CLI_H_

#include <iosfwd>

namespace vmdeploy {

// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitInfeasible = 1,
  kExitTimeout = 2,
  kExitInputError = 3,
  kExitInternalError = 4,
};

// Entry point of the `vmdeploy` tool with injectable streams:
//   validate <model>
//   clique <model>
//   strategies
//   solve <model> --offers <file|seed:S,N> [--strategy S] [--timeout T] [--M K]
//   export <model> --offers ... --format smt2|lp|flatcp --out FILE
//          [--strategy S] [--M K]
//   bench --config FILE [--out DIR]
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace vmdeploy

#endif  // VMDEPLOY_CLI_H_
