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

#include <cstddef>
#include <span>

namespace wader {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation, divisor n-1
  double min = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double max = 0.0;
};

// Linear interpolation between closest ranks: position (n-1)*q on the
// sorted sample. `sorted` must be non-empty and ascending.
double quantile(std::span<const double> sorted, double q);

// Throws InvalidInput on an empty sample. A single value has std_dev 0.
Summary summarize(std::span<const double> values);

}  // namespace wader
