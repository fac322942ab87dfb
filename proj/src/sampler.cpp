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

#include "wader/sampler.hpp"

#include <cmath>

#include "wader/delimited.hpp"
#include "wader/error.hpp"

namespace wader {

void SamplingConfig::validate() const {
  if (!std::isfinite(threshold_p) || threshold_p < kMinLabel ||
      threshold_p > kMaxLabel) {
    throw InvalidInput("threshold_p " + format_exact(threshold_p) +
                       " outside [1, 5]");
  }
}

Corpus sample_candidates(const Corpus& corpus, const SamplingConfig& config) {
  config.validate();
  std::vector<LabeledText> kept;
  for (const auto& item : corpus.items()) {
    const bool keep = config.boundary_inclusive
                          ? item.label >= config.threshold_p
                          : item.label > config.threshold_p;
    if (keep) kept.push_back(item);
  }
  return Corpus(std::move(kept), corpus.unseen_languages());
}

}  // namespace wader
