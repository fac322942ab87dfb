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

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "wader/corpus.hpp"
#include "wader/evaluator.hpp"
#include "wader/retry.hpp"

namespace wader {

struct TranslationSettings {
  std::string backend = "mock-noisy";  // mock-identity | mock-noisy | http
  std::string http_url;
  double noise_q = 0.2;
  bool single_back = false;
  std::size_t max_in_flight = 4;
  std::size_t batch_size = 32;
};

struct ScorerSettings {
  std::string backend = "reference";  // reference | http
  std::string http_url;
  double l2 = 3e-4;
  double tolerance = 1e-6;
  std::size_t batch_size = 32;
};

// Members name pipeline systems ("baseline", "beta_0.1", ...) or point at
// prediction files (anything ending in ".tsv").
struct EnsembleSpec {
  std::string name;
  std::vector<std::string> members;
};

struct PipelineConfig {
  std::string corpus_path;
  std::string eval_path;  // optional; defaults to the held-out split
  std::string output_dir;
  LanguageSet unseen_languages = {"ar", "hi", "ko", "nl"};
  double threshold_p = 3.2;
  bool boundary_inclusive = true;
  std::vector<double> betas = {0.1, 0.2, 0.3};
  std::uint64_t seed = 7;
  double validation_fraction = 0.15;
  double histogram_bin_width = 0.5;
  GroupMode group_mode = GroupMode::kPooled;
  TranslationSettings translation;
  ScorerSettings scorer;
  RetryPolicy retry;
  std::vector<EnsembleSpec> ensembles;  // empty: one ensemble of all betas

  // Throws InvalidInput on the first bad field.
  void validate() const;
  // Unknown keys are rejected.
  static PipelineConfig from_json(const nlohmann::json& doc);
  static PipelineConfig load(const std::string& path);
  nlohmann::json to_json() const;

  std::vector<std::string> systems() const;  // baseline, then one per beta
};

std::string beta_name(double beta);  // "beta_0.1"

enum class Stage {
  kIngest,
  kStats,
  kSample,
  kTranslate,
  kValidate,
  kSelect,
  kAssemble,
  kTrainReference,
  kPredict,
  kEvaluate,
  kEnsemble,
};

const std::vector<Stage>& all_stages();
std::string stage_name(Stage stage);
Stage parse_stage(std::string_view name);

struct RunOptions {
  bool force = false;  // re-run even when the manifest says up to date
  Sleeper sleeper = real_sleeper();
};

struct StageResult {
  Stage stage = Stage::kIngest;
  bool executed = false;
  std::vector<std::string> outputs;  // relative to output_dir
};

// Runs one stage. Every stage writes under output_dir/<stage>/ plus a
// manifest.json holding the stage's config hash and the SHA-256 of each
// input and output. A stage whose manifest matches the current config and
// inputs, with outputs intact, is skipped. A manifest written under a
// different config is refused unless options.force is set.
StageResult run_stage(Stage stage, const PipelineConfig& config,
                      const RunOptions& options = {});

std::vector<StageResult> run_pipeline(const PipelineConfig& config,
                                      const RunOptions& options = {});

}  // namespace wader
