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

#include <filesystem>
#include <map>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "synthetic.hpp"
#include "wader/delimited.hpp"
#include "wader/error.hpp"
#include "wader/evaluator.hpp"
#include "wader/pipeline.hpp"
#include "wader/translator.hpp"
#include "wader/validator.hpp"

using namespace wader;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

PipelineConfig small_config(const fs::path& dir) {
  const Corpus gold = testing::token_corpus(10, testing::seen_six(), 21);
  write_corpus(gold, (dir / "gold.csv").string());
  PipelineConfig config;
  config.corpus_path = (dir / "gold.csv").string();
  config.output_dir = (dir / "out").string();
  config.translation.backend = "mock-noisy";
  config.translation.noise_q = 0.2;
  config.seed = 7;
  return config;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      files[fs::relative(entry.path(), root).string()] =
          read_file(entry.path().string());
    }
  }
  return files;
}

}  // namespace

TEST_CASE("config JSON round-trip and strictness") {
  PipelineConfig c;
  c.corpus_path = "gold.csv";
  c.output_dir = "out";
  c.betas = {0.05, 0.5};
  c.translation.single_back = true;
  c.ensembles = {{"pair", {"beta_0.05", "beta_0.5"}}};
  const PipelineConfig back = PipelineConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.betas == c.betas);
  CHECK(back.translation.single_back);

  json doc = c.to_json();
  doc["unknown"] = 1;
  CHECK_THROWS_AS(PipelineConfig::from_json(doc), InvalidInput);
  doc = c.to_json();
  doc["scorer"]["l3"] = 1;
  CHECK_THROWS_AS(PipelineConfig::from_json(doc), InvalidInput);
  doc = c.to_json();
  doc["betas"] = "0.1";
  CHECK_THROWS_AS(PipelineConfig::from_json(doc), InvalidInput);
}

TEST_CASE("config validation rejects bad fields before any stage runs") {
  PipelineConfig good;
  good.corpus_path = "g.csv";
  good.output_dir = "o";
  CHECK_NOTHROW(good.validate());
  auto expect_bad = [&](auto mutate) {
    PipelineConfig c = good;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), InvalidInput);
  };
  expect_bad([](PipelineConfig& c) { c.corpus_path.clear(); });
  expect_bad([](PipelineConfig& c) { c.threshold_p = 6.0; });
  expect_bad([](PipelineConfig& c) { c.betas = {}; });
  expect_bad([](PipelineConfig& c) { c.betas = {-0.1}; });
  expect_bad([](PipelineConfig& c) { c.betas = {0.1, 0.1}; });
  expect_bad([](PipelineConfig& c) { c.validation_fraction = 1.0; });
  expect_bad([](PipelineConfig& c) { c.translation.backend = "google"; });
  expect_bad([](PipelineConfig& c) { c.translation.backend = "http"; });
  expect_bad([](PipelineConfig& c) { c.translation.noise_q = 1.5; });
  expect_bad([](PipelineConfig& c) { c.translation.max_in_flight = 0; });
  expect_bad([](PipelineConfig& c) { c.scorer.l2 = 0.0; });
  expect_bad([](PipelineConfig& c) { c.scorer.backend = "http"; });
  expect_bad([](PipelineConfig& c) { c.unseen_languages = {"Hindi"}; });
  expect_bad([](PipelineConfig& c) { c.ensembles = {{"e", {"beta_0.9"}}}; });
  expect_bad([](PipelineConfig& c) { c.ensembles = {{"e", {}}}; });
}

TEST_CASE("stage names") {
  CHECK(all_stages().size() == 11);
  for (Stage s : all_stages()) CHECK(parse_stage(stage_name(s)) == s);
  CHECK(stage_name(Stage::kTrainReference) == "train-reference");
  CHECK_THROWS_AS(parse_stage("deploy"), InvalidInput);
  CHECK(beta_name(0.1) == "beta_0.1");
}

TEST_CASE("missing upstream artifact is reported with the producing stage") {
  const fs::path dir = scratch("wader_pipeline_missing");
  const PipelineConfig config = small_config(dir);
  try {
    run_stage(Stage::kSample, config);
    FAIL("expected error");
  } catch (const MissingArtifact& e) {
    CHECK(e.code() == ExitCode::kMissingArtifact);
    CHECK(std::string(e.what()).find("'ingest'") != std::string::npos);
  }
  PipelineConfig missing_corpus = config;
  missing_corpus.corpus_path = (dir / "nope.csv").string();
  CHECK_THROWS_AS(run_stage(Stage::kIngest, missing_corpus), InvalidInput);
  fs::remove_all(dir);
}

TEST_CASE("full pipeline: artifacts, counts, memoization, determinism") {
  const fs::path dir = scratch("wader_pipeline_full");
  PipelineConfig config = small_config(dir);
  const auto first = run_pipeline(config);
  REQUIRE(first.size() == 11);
  for (const auto& result : first) {
    CHECK(result.executed);
    CHECK(fs::exists(fs::path(config.output_dir) / stage_name(result.stage) /
                     "manifest.json"));
  }

  const fs::path out(config.output_dir);
  const Corpus train = load_corpus((out / "ingest/train.csv").string(),
                                   config.unseen_languages);
  const Corpus validation =
      load_corpus((out / "ingest/validation.csv").string());
  CHECK(train.size() + validation.size() == 60);

  const Corpus candidates =
      load_corpus((out / "sample/candidates.csv").string());
  for (const auto& item : candidates.items()) CHECK(item.label >= 3.2);

  const json translate_summary =
      json::parse(read_file((out / "translate/summary.json").string()));
  const std::size_t planned = translate_summary["planned"];
  CHECK(planned == candidates.size() * (2 * 5 + 4));
  const auto augmented =
      parse_augmented(read_file((out / "translate/augmented.csv").string()));
  CHECK(augmented.size() + translate_summary["degenerate"].get<std::size_t>() +
            translate_summary["failed"].get<std::size_t>() ==
        planned);

  const auto validated =
      parse_validated(read_file((out / "validate/validated.csv").string()));
  // Nested selections, and assembled = gold train + selected.
  std::set<std::string> previous;
  for (double beta : config.betas) {
    const auto selected = parse_validated(
        read_file((out / "select" / (beta_name(beta) + ".csv")).string()));
    CHECK(selected == select_by_difference(validated, beta));
    std::set<std::string> ids;
    for (const auto& v : selected) ids.insert(v.example.id);
    for (const auto& id : previous) CHECK(ids.count(id) == 1);
    previous = ids;
    const Corpus assembled = load_corpus(
        (out / "assemble" / (beta_name(beta) + ".csv")).string());
    CHECK(assembled.size() == train.size() + selected.size());
    CHECK(fs::exists(out / "train-reference" / (beta_name(beta) + ".bin")));
    CHECK(load_predictions((out / "predict" / (beta_name(beta) + ".tsv")).string())
              .size() == validation.size());
  }
  const json report =
      json::parse(read_file((out / "evaluate/report.json").string()));
  CHECK(report["systems"].size() == 4);
  CHECK(fs::exists(out / "ensemble/all-betas.tsv"));

  // Rerun with the same config: nothing executes.
  const auto before = snapshot(out);
  for (const auto& result : run_pipeline(config)) CHECK_FALSE(result.executed);
  CHECK(snapshot(out) == before);

  // A fresh run in another directory is byte-identical.
  PipelineConfig twin = config;
  twin.output_dir = (dir / "twin").string();
  run_pipeline(twin);
  CHECK(snapshot(fs::path(twin.output_dir)) == before);

  // Changed config without --force is refused; with force it re-runs.
  PipelineConfig changed = config;
  changed.betas = {0.1, 0.2};
  CHECK_THROWS_AS(run_stage(Stage::kSelect, changed), InvalidInput);
  RunOptions force;
  force.force = true;
  CHECK(run_stage(Stage::kSelect, changed, force).executed);

  // Editing an upstream artifact makes the downstream stage re-run.
  const auto kept = run_stage(Stage::kStats, config);
  CHECK_FALSE(kept.executed);
  fs::remove(out / "stats" / "stats.txt");
  CHECK(run_stage(Stage::kStats, config).executed);
  fs::remove_all(dir);
}

TEST_CASE("validate resumes from a persisted cursor") {
  const fs::path dir = scratch("wader_pipeline_resume");
  PipelineConfig config = small_config(dir);
  for (Stage s : {Stage::kIngest, Stage::kSample, Stage::kTranslate}) {
    run_stage(s, config);
  }
  // Scorer service that is down: validate fails with a backend error.
  PipelineConfig down = config;
  down.scorer.backend = "http";
  down.scorer.http_url = "http://127.0.0.1:9";
  down.retry.max_attempts = 1;
  down.scorer.batch_size = 4;
  RunOptions options;
  options.sleeper = [](std::chrono::milliseconds) {};
  CHECK_THROWS_AS(run_stage(Stage::kValidate, down, options), BackendError);
  const fs::path out(config.output_dir);
  CHECK(fs::exists(out / "validate/cursor.json"));
  CHECK_FALSE(fs::exists(out / "validate/manifest.json"));
  // The reference scorer then completes the stage and clears the cursor.
  CHECK(run_stage(Stage::kValidate, config).executed);
  CHECK_FALSE(fs::exists(out / "validate/cursor.json"));
  fs::remove_all(dir);
}
