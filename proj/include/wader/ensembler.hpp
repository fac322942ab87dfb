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

#include <span>
#include <string>
#include <vector>

#include "wader/evaluator.hpp"

namespace wader {

struct EnsembleConfig {
  std::string name;
  std::vector<std::string> members;  // prediction file paths

  void validate() const;
};

// Manifest JSON: {"name": "...", "members": ["path", ...]}. Relative member
// paths resolve against the manifest's directory.
EnsembleConfig load_ensemble_manifest(const std::string& path);

// Mean of member scores per id, then clamped to [1, 5]; output follows the
// first member's order. Member scores for an id are averaged in ascending
// order with a running mean, which makes the result exactly invariant to
// member order and exact for identical members. Throws InvalidInput when
// id sets differ, naming the symmetric difference.
PredictionFile ensemble(std::span<const PredictionFile> members);
PredictionFile ensemble(const EnsembleConfig& config);

// The six mixes of XLM-R / XLNet runs at beta 0.1/0.2/0.3: "ensemble-1"
// (all XLM-R), "ensemble-2" (all XLNet), "ensemble-3".."ensemble-5" (the
// pair at one beta), "ensemble-6" (all six). Member files are named
// "{xlmr,xlnet}_beta{0.1,0.2,0.3}.tsv" under `directory`.
EnsembleConfig ensemble_preset(const std::string& name,
                               const std::string& directory);
std::vector<std::string> ensemble_preset_names();

}  // namespace wader
