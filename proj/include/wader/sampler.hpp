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

#include "wader/corpus.hpp"

namespace wader {

// Distribution-based candidate selection: keep the sparse upper tail of the
// label distribution.
struct SamplingConfig {
  double threshold_p = 3.2;
  bool boundary_inclusive = true;

  // Throws InvalidInput unless threshold_p is in [1, 5].
  void validate() const;
};

// Items with label >= p (or > p when the boundary is exclusive), in corpus
// order with their original ids. Unseen languages carry over.
Corpus sample_candidates(const Corpus& corpus, const SamplingConfig& config = {});

}  // namespace wader
