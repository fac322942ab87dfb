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

#include <chrono>
#include <functional>

namespace wader {

// Exponential backoff: attempt k (0-based) that fails transiently waits
// base * factor^k before the next attempt.
struct RetryPolicy {
  std::chrono::milliseconds base{500};
  double factor = 2.0;
  int max_attempts = 5;

  std::chrono::milliseconds delay(int attempt) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Sleeper that blocks the calling thread.
Sleeper real_sleeper();

}  // namespace wader
