//
// Copyright 2026 The WADER Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <stdexcept>
#include <string>

namespace wader {

// Process exit codes used by the CLI. Each exception family maps to one.
enum class ExitCode : int {
  kOk = 0,
  kInvalidInput = 1,
  kMissingArtifact = 2,
  kBackend = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

// Malformed data, bad configuration, violated preconditions.
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what)
      : Error(ExitCode::kInvalidInput, what) {}
};

// An upstream stage artifact is absent or unreadable.
class MissingArtifact : public Error {
 public:
  explicit MissingArtifact(const std::string& what)
      : Error(ExitCode::kMissingArtifact, what) {}
};

enum class BackendFailure {
  kRejected,     // 400: the batch itself is malformed; never retried.
  kExhausted,    // 429/5xx persisted through every retry.
  kUnreachable,  // connection-level failure through every retry.
};

class BackendError : public Error {
 public:
  BackendError(BackendFailure failure, const std::string& what)
      : Error(ExitCode::kBackend, what), failure_(failure) {}
  BackendFailure failure() const { return failure_; }

 private:
  BackendFailure failure_;
};

}  // namespace wader
