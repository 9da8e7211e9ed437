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

#ifndef VMDEPLOY_ERRORS_H_
#define VMDEPLOY_ERRORS_H_

#include <stdexcept>
#include <string>

namespace vmdeploy {

// Malformed or inconsistent user input (model files, catalogs, configs,
// command lines). The CLI maps it to exit code 3.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parse failure with a location: either "line:column" for syntax errors or a
// field path such as "components[2].cpu".
class ParseError : public InputError {
 public:
  ParseError(std::string location, const std::string& what)
      : InputError(location + ": " + what), location_(std::move(location)) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

// The model cannot be satisfied with the requested number of VM columns.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No upper bound on the VM count can be derived; the caller must pass M.
class UnboundedModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Brute-force enumeration refused because the candidate space is too big.
class InstanceTooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ExecutableMissingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vmdeploy

#endif  // VMDEPLOY_ERRORS_H_
