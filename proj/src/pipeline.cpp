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

#include "wader/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <set>

#include "spdlog/spdlog.h"
#include "wader/delimited.hpp"
#include "wader/digest.hpp"
#include "wader/ensembler.hpp"
#include "wader/error.hpp"
#include "wader/http_backends.hpp"
#include "wader/sampler.hpp"
#include "wader/scorer.hpp"
#include "wader/translator.hpp"
#include "wader/validator.hpp"

namespace wader {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// An input the stage reads: manifest key plus location on disk.
struct StageInput {
  std::string key;
  fs::path path;
  bool external = false;  // user-supplied rather than an upstream artifact
  Stage producer = Stage::kIngest;
};

constexpr char kCorpus[] = "ingest/corpus.csv";
constexpr char kTrain[] = "ingest/train.csv";
constexpr char kValidation[] = "ingest/validation.csv";
constexpr char kEval[] = "ingest/eval.csv";
constexpr char kCandidates[] = "sample/candidates.csv";
constexpr char kAugmented[] = "translate/augmented.csv";
constexpr char kValidated[] = "validate/validated.csv";

template <typename T>
T get_field(const json& object, const std::string& key, const T& fallback) {
  const auto it = object.find(key);
  if (it == object.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput("config field '" + key + "': " + e.what());
  }
}

void reject_unknown(const json& object, std::string_view where,
                    std::initializer_list<std::string_view> allowed) {
  if (!object.is_object()) {
    throw InvalidInput("config: '" + std::string(where) +
                       "' must be an object");
  }
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidInput("config: unknown key '" + key + "' in " +
                         std::string(where));
    }
  }
}

class Workspace {
 public:
  explicit Workspace(const PipelineConfig& config) : root_(config.output_dir) {}
  fs::path path(const std::string& relative) const { return root_ / relative; }
  std::string str(const std::string& relative) const {
    return path(relative).string();
  }
  void write(const std::string& relative, std::string_view content) const {
    fs::create_directories(path(relative).parent_path());
    write_file(str(relative), content);
  }
  std::string read(const std::string& relative) const {
    return read_file(str(relative));
  }

 private:
  fs::path root_;
};

std::string rel(Stage stage, const std::string& file) {
  return stage_name(stage) + "/" + file;
}

std::string model_file(const std::string& system) {
  return rel(Stage::kTrainReference, system + ".bin");
}
std::string prediction_file(const std::string& system) {
  return rel(Stage::kPredict, system + ".tsv");
}

bool is_path_member(const std::string& member) {
  return member.size() > 4 && member.substr(member.size() - 4) == ".tsv";
}

std::vector<EnsembleSpec> effective_ensembles(const PipelineConfig& config) {
  if (!config.ensembles.empty()) return config.ensembles;
  EnsembleSpec all{"all-betas", {}};
  for (double beta : config.betas) all.members.push_back(beta_name(beta));
  return {all};
}

std::string member_path(const Workspace& ws, const std::string& member) {
  return is_path_member(member) ? member : ws.str(prediction_file(member));
}

std::vector<StageInput> stage_inputs(Stage stage, const PipelineConfig& config) {
  const Workspace ws(config);
  std::vector<StageInput> inputs;
  auto internal = [&](const std::string& relative, Stage producer) {
    inputs.push_back({relative, ws.path(relative), false, producer});
  };
  switch (stage) {
    case Stage::kIngest:
      inputs.push_back({"corpus", config.corpus_path, true});
      if (!config.eval_path.empty()) {
        inputs.push_back({"eval", config.eval_path, true});
      }
      break;
    case Stage::kStats:
      internal(kCorpus, Stage::kIngest);
      break;
    case Stage::kSample:
      internal(kTrain, Stage::kIngest);
      break;
    case Stage::kTranslate:
      internal(kTrain, Stage::kIngest);
      internal(kCandidates, Stage::kSample);
      break;
    case Stage::kValidate:
      internal(kTrain, Stage::kIngest);
      internal(kAugmented, Stage::kTranslate);
      break;
    case Stage::kSelect:
      internal(kValidated, Stage::kValidate);
      break;
    case Stage::kAssemble:
      internal(kTrain, Stage::kIngest);
      for (double beta : config.betas) {
        internal(rel(Stage::kSelect, beta_name(beta) + ".csv"), Stage::kSelect);
      }
      break;
    case Stage::kTrainReference:
      internal(kTrain, Stage::kIngest);
      for (double beta : config.betas) {
        internal(rel(Stage::kAssemble, beta_name(beta) + ".csv"),
                 Stage::kAssemble);
      }
      break;
    case Stage::kPredict:
      internal(kEval, Stage::kIngest);
      for (const auto& system : config.systems()) {
        internal(model_file(system), Stage::kTrainReference);
      }
      break;
    case Stage::kEvaluate:
      internal(kTrain, Stage::kIngest);
      internal(kEval, Stage::kIngest);
      for (const auto& system : config.systems()) {
        internal(prediction_file(system), Stage::kPredict);
      }
      break;
    case Stage::kEnsemble: {
      internal(kTrain, Stage::kIngest);
      internal(kEval, Stage::kIngest);
      std::set<std::string> members;
      for (const auto& spec : effective_ensembles(config)) {
        members.insert(spec.members.begin(), spec.members.end());
      }
      for (const auto& member : members) {
        if (is_path_member(member)) {
          inputs.push_back({"member:" + member, member, true});
        } else {
          internal(prediction_file(member), Stage::kPredict);
        }
      }
      break;
    }
  }
  return inputs;
}

json translation_json(const TranslationSettings& t) {
  return {{"backend", t.backend},         {"http_url", t.http_url},
          {"noise_q", t.noise_q},         {"single_back", t.single_back},
          {"max_in_flight", t.max_in_flight}, {"batch_size", t.batch_size}};
}

json scorer_json(const ScorerSettings& s) {
  return {{"backend", s.backend},
          {"http_url", s.http_url},
          {"l2", s.l2},
          {"tolerance", s.tolerance},
          {"batch_size", s.batch_size}};
}

json ensembles_json(const std::vector<EnsembleSpec>& specs) {
  json out = json::array();
  for (const auto& spec : specs) {
    out.push_back({{"name", spec.name}, {"members", spec.members}});
  }
  return out;
}

// Only the settings that can change a stage's outputs.
json stage_config(Stage stage, const PipelineConfig& config) {
  const json unseen = config.unseen_languages;
  switch (stage) {
    case Stage::kIngest:
      return {{"unseen_languages", unseen},
              {"validation_fraction", config.validation_fraction},
              {"seed", config.seed},
              {"has_eval", !config.eval_path.empty()}};
    case Stage::kStats:
      return {{"histogram_bin_width", config.histogram_bin_width}};
    case Stage::kSample:
      return {{"threshold_p", config.threshold_p},
              {"boundary_inclusive", config.boundary_inclusive}};
    case Stage::kTranslate: {
      json t = translation_json(config.translation);
      t.erase("max_in_flight");
      return {{"translation", t},
              {"unseen_languages", unseen},
              {"seed", config.seed}};
    }
    case Stage::kValidate: {
      json s = scorer_json(config.scorer);
      s.erase("batch_size");
      return {{"scorer", s}};
    }
    case Stage::kSelect:
    case Stage::kAssemble:
    case Stage::kPredict:
      return {{"betas", config.betas}};
    case Stage::kTrainReference:
      return {{"betas", config.betas},
              {"l2", config.scorer.l2},
              {"tolerance", config.scorer.tolerance}};
    case Stage::kEvaluate:
      return {{"betas", config.betas},
              {"group_mode", group_mode_name(config.group_mode)},
              {"unseen_languages", unseen}};
    case Stage::kEnsemble:
      return {{"ensembles", ensembles_json(effective_ensembles(config))},
              {"group_mode", group_mode_name(config.group_mode)},
              {"unseen_languages", unseen}};
  }
  return {};
}

std::string stats_table(const CorpusStats& stats) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %7s %9s %9s %9s %9s %9s\n",
                "Language", "Count", "Mean", "StdDev", "p25", "p50", "p75");
  out += line;
  auto row = [&](const std::string& name, const LabelStats& s) {
    std::snprintf(line, sizeof(line),
                  "%-10s %7zu %9.4f %9.6f %9.4f %9.4f %9.4f\n", name.c_str(),
                  s.count, s.mean, s.std_dev, s.p25, s.p50, s.p75);
    out += line;
  };
  for (const auto& [language, s] : stats.per_language) row(language, s);
  row("Overall", stats.overall);
  return out;
}

json label_stats_json(const LabelStats& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"std_dev", s.std_dev},
          {"p25", s.p25},     {"p50", s.p50},   {"p75", s.p75}};
}

json summary_json(const Summary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"std", s.std_dev},
          {"min", s.min},     {"p25", s.p25},   {"p50", s.p50},
          {"p75", s.p75},     {"max", s.max}};
}

std::unique_ptr<TranslationBackend> make_translation_backend(
    const PipelineConfig& config, const RunOptions& options) {
  const TranslationSettings& t = config.translation;
  if (t.backend == "mock-identity") return std::make_unique<IdentityBackend>();
  if (t.backend == "mock-noisy") {
    return std::make_unique<NoisyBackend>(t.noise_q, config.seed);
  }
  return std::make_unique<HttpTranslationBackend>(t.http_url, config.retry,
                                                  options.sleeper);
}

std::vector<std::string> run_ingest(const PipelineConfig& config,
                                    const Workspace& ws) {
  const Corpus corpus =
      load_corpus(config.corpus_path, config.unseen_languages);
  const SplitResult parts =
      split(corpus, config.validation_fraction, config.seed);
  ws.write(kCorpus, format_corpus(corpus));
  ws.write(kTrain, format_corpus(parts.train));
  ws.write(kValidation, format_corpus(parts.validation));
  if (config.eval_path.empty()) {
    ws.write(kEval, format_corpus(parts.validation));
  } else {
    ws.write(kEval, format_corpus(load_corpus(config.eval_path)));
  }
  return {kCorpus, kTrain, kValidation, kEval};
}

std::vector<std::string> run_stats(const PipelineConfig& config,
                                   const Workspace& ws) {
  const Corpus corpus = load_corpus(ws.str(kCorpus), config.unseen_languages);
  const CorpusStats stats = describe(corpus);
  json doc;
  for (const auto& [language, s] : stats.per_language) {
    doc["per_language"][language] = label_stats_json(s);
  }
  doc["overall"] = label_stats_json(stats.overall);

  json hist;
  for (const auto& [language, bins] :
       histogram(corpus, config.histogram_bin_width)) {
    json rows = json::array();
    for (const auto& bin : bins) {
      rows.push_back({{"lower", bin.lower}, {"count", bin.count}});
    }
    hist[language] = rows;
  }
  const std::string stats_json = rel(Stage::kStats, "stats.json");
  const std::string stats_txt = rel(Stage::kStats, "stats.txt");
  const std::string hist_json = rel(Stage::kStats, "histogram.json");
  ws.write(stats_json, doc.dump(2) + "\n");
  ws.write(stats_txt, stats_table(stats));
  ws.write(hist_json,
           json{{"bin_width", config.histogram_bin_width}, {"bins", hist}}
                   .dump(2) +
               "\n");
  return {stats_json, stats_txt, hist_json};
}

std::vector<std::string> run_sample(const PipelineConfig& config,
                                    const Workspace& ws) {
  const Corpus train = load_corpus(ws.str(kTrain), config.unseen_languages);
  const Corpus candidates = sample_candidates(
      train, {config.threshold_p, config.boundary_inclusive});
  ws.write(kCandidates, format_corpus(candidates));
  spdlog::info("sample: {} of {} items at or above p = {}", candidates.size(),
               train.size(), config.threshold_p);
  return {kCandidates};
}

std::string format_failures(const std::vector<TranslationFailure>& failures) {
  std::string out;
  write_row(out, {"id", "source", "target", "reason"}, ',');
  for (const auto& f : failures) {
    write_row(out, {f.id, f.source, f.target, f.reason}, ',');
  }
  return out;
}

std::vector<std::string> run_translate(const PipelineConfig& config,
                                       const Workspace& ws,
                                       const RunOptions& options) {
  const Corpus train = load_corpus(ws.str(kTrain), config.unseen_languages);
  const Corpus candidates =
      load_corpus(ws.str(kCandidates), config.unseen_languages);
  PlanOptions plan_options;
  plan_options.single_back = config.translation.single_back;
  plan_options.seen = train.seen_languages();
  const TranslationPlan plan =
      build_plan(candidates, config.unseen_languages, plan_options);
  auto backend = make_translation_backend(config, options);
  const ExecuteOptions exec{config.translation.batch_size,
                            config.translation.max_in_flight};

  const std::string failures_csv = rel(Stage::kTranslate, "failures.csv");
  const std::string degenerate_txt = rel(Stage::kTranslate, "degenerate.txt");
  const std::string summary = rel(Stage::kTranslate, "summary.json");
  auto persist = [&](const ExecutionReport& report, const std::string& out) {
    ws.write(out, format_augmented(report.examples));
    ws.write(failures_csv, format_failures(report.failures));
    std::string degenerate;
    for (const auto& id : report.degenerate) degenerate += id + "\n";
    ws.write(degenerate_txt, degenerate);
    ws.write(summary, json{{"planned", report.planned},
                           {"produced", report.examples.size()},
                           {"degenerate", report.degenerate.size()},
                           {"failed", report.failures.size()},
                           {"candidates", plan.candidates.size()}}
                              .dump(2) +
                          "\n");
  };

  ExecutionReport report;
  try {
    report = execute_plan(plan, *backend, exec);
  } catch (const TranslationAborted& e) {
    persist(e.partial(), rel(Stage::kTranslate, "augmented.partial.csv"));
    throw;
  }
  persist(report, kAugmented);
  fs::remove(ws.path(rel(Stage::kTranslate, "augmented.partial.csv")));
  spdlog::info("translate: {} outputs ({} planned, {} degenerate, {} failed)",
               report.examples.size(), report.planned,
               report.degenerate.size(), report.failures.size());
  return {kAugmented, failures_csv, degenerate_txt, summary};
}

std::vector<std::string> run_validate(const PipelineConfig& config,
                                      const Workspace& ws,
                                      const RunOptions& options) {
  const std::string augmented_text = ws.read(kAugmented);
  DedupResult dedup = deduplicate(parse_augmented(augmented_text));

  std::vector<std::string> outputs;
  std::unique_ptr<ScorerBackend> scorer;
  if (config.scorer.backend == "reference") {
    const Corpus train = load_corpus(ws.str(kTrain), config.unseen_languages);
    TrainOptions train_options;
    train_options.l2 = config.scorer.l2;
    train_options.tolerance = config.scorer.tolerance;
    train_options.seed = config.seed;
    NgramRegressor model = train_reference(train, train_options);
    const std::string baseline = rel(Stage::kValidate, "baseline.bin");
    ws.write(baseline, serialize_model(model));
    outputs.push_back(baseline);
    scorer = std::make_unique<ReferenceScorer>(std::move(model));
  } else {
    scorer = std::make_unique<HttpScorerBackend>(
        config.scorer.http_url, config.retry, options.sleeper);
  }

  // A failed run leaves partial results plus a cursor; a rerun over the
  // same input picks up where it stopped.
  const std::string partial_csv = rel(Stage::kValidate, "partial.csv");
  const std::string cursor_json = rel(Stage::kValidate, "cursor.json");
  const std::string resume_key =
      sha256_hex(augmented_text + stage_config(Stage::kValidate, config).dump());
  ValidateOptions validate_options;
  validate_options.batch_size = config.scorer.batch_size;
  if (fs::exists(ws.path(cursor_json)) && fs::exists(ws.path(partial_csv))) {
    const json cursor = json::parse(ws.read(cursor_json));
    if (cursor.value("key", "") == resume_key) {
      validate_options.resumed = parse_validated(ws.read(partial_csv));
      validate_options.resume_from = validate_options.resumed.size();
      spdlog::info("validate: resuming at example {}",
                   validate_options.resume_from);
    }
  }

  std::vector<ValidatedExample> validated;
  try {
    validated = validate(dedup.kept, *scorer, std::move(validate_options));
  } catch (const ValidationAborted& e) {
    ws.write(partial_csv, format_validated(e.partial()));
    ws.write(cursor_json,
             json{{"key", resume_key}, {"completed", e.cursor()}}.dump(2) +
                 "\n");
    throw;
  }
  fs::remove(ws.path(partial_csv));
  fs::remove(ws.path(cursor_json));

  ws.write(kValidated, format_validated(validated));
  json summary = {{"count", validated.size()},
                  {"duplicates_removed", dedup.removed}};
  summary["difference"] =
      validated.empty() ? json(nullptr) : summary_json(difference_stats(validated));
  const std::string summary_path = rel(Stage::kValidate, "summary.json");
  ws.write(summary_path, summary.dump(2) + "\n");
  spdlog::info("validate: {} examples scored, {} duplicates removed",
               validated.size(), dedup.removed);
  outputs.push_back(kValidated);
  outputs.push_back(summary_path);
  return outputs;
}

std::vector<std::string> run_select(const PipelineConfig& config,
                                    const Workspace& ws) {
  const auto validated = parse_validated(ws.read(kValidated));
  std::vector<std::string> outputs;
  json counts = json::object();
  for (double beta : config.betas) {
    const auto selected = select_by_difference(validated, beta);
    const std::string out = rel(Stage::kSelect, beta_name(beta) + ".csv");
    ws.write(out, format_validated(selected));
    counts[beta_name(beta)] = selected.size();
    outputs.push_back(out);
  }
  const std::string summary = rel(Stage::kSelect, "summary.json");
  ws.write(summary, json{{"validated", validated.size()}, {"selected", counts}}
                            .dump(2) +
                        "\n");
  outputs.push_back(summary);
  return outputs;
}

std::vector<std::string> run_assemble(const PipelineConfig& config,
                                      const Workspace& ws) {
  const Corpus train = load_corpus(ws.str(kTrain), config.unseen_languages);
  std::vector<std::string> outputs;
  for (double beta : config.betas) {
    const auto selected =
        parse_validated(ws.read(rel(Stage::kSelect, beta_name(beta) + ".csv")));
    const Corpus assembled = assemble_training_set(train, selected);
    const std::string out = rel(Stage::kAssemble, beta_name(beta) + ".csv");
    ws.write(out, format_corpus(assembled));
    outputs.push_back(out);
  }
  return outputs;
}

std::vector<std::string> run_train_reference(const PipelineConfig& config,
                                             const Workspace& ws) {
  TrainOptions train_options;
  train_options.l2 = config.scorer.l2;
  train_options.tolerance = config.scorer.tolerance;
  train_options.seed = config.seed;
  std::vector<std::string> outputs;
  json summary = json::object();
  for (const auto& system : config.systems()) {
    const std::string source =
        system == "baseline" ? std::string(kTrain)
                             : rel(Stage::kAssemble, system + ".csv");
    const Corpus corpus = load_corpus(ws.str(source));
    TrainReport report;
    const NgramRegressor model =
        train_reference(corpus, train_options, &report);
    ws.write(model_file(system), serialize_model(model));
    outputs.push_back(model_file(system));
    summary[system] = {{"items", corpus.size()},
                       {"iterations", report.iterations},
                       {"relative_residual", report.relative_residual},
                       {"active_features", report.active_features}};
  }
  const std::string summary_path = rel(Stage::kTrainReference, "summary.json");
  ws.write(summary_path, summary.dump(2) + "\n");
  outputs.push_back(summary_path);
  return outputs;
}

std::vector<std::string> run_predict(const PipelineConfig& config,
                                     const Workspace& ws) {
  const Corpus eval = load_corpus(ws.str(kEval));
  const auto items = to_score_items(eval);
  std::vector<std::string> outputs;
  for (const auto& system : config.systems()) {
    ReferenceScorer scorer(load_model(ws.str(model_file(system))));
    const PredictionFile predictions(predict(scorer, items));
    ws.write(prediction_file(system), format_predictions(predictions));
    outputs.push_back(prediction_file(system));
  }
  return outputs;
}

void write_reports(const Workspace& ws, Stage stage,
                   const std::vector<NamedReport>& rows,
                   std::vector<std::string>& outputs) {
  const std::string report_json = rel(stage, "report.json");
  const std::string report_txt = rel(stage, "report.txt");
  ws.write(report_json, render_json(rows));
  ws.write(report_txt, render_table(rows));
  outputs.push_back(report_json);
  outputs.push_back(report_txt);
}

std::vector<std::string> run_evaluate(const PipelineConfig& config,
                                      const Workspace& ws) {
  const Corpus train = load_corpus(ws.str(kTrain), config.unseen_languages);
  const Corpus eval = load_corpus(ws.str(kEval));
  std::vector<NamedReport> rows;
  for (const auto& system : config.systems()) {
    const PredictionFile predictions =
        parse_predictions(ws.read(prediction_file(system)));
    rows.push_back({system, evaluate(predictions, eval, train.seen_languages(),
                                     config.unseen_languages,
                                     config.group_mode)});
  }
  std::vector<std::string> outputs;
  write_reports(ws, Stage::kEvaluate, rows, outputs);
  return outputs;
}

std::vector<std::string> run_ensemble(const PipelineConfig& config,
                                      const Workspace& ws) {
  const Corpus train = load_corpus(ws.str(kTrain), config.unseen_languages);
  const Corpus eval = load_corpus(ws.str(kEval));
  std::vector<NamedReport> rows;
  std::vector<std::string> outputs;
  for (const auto& spec : effective_ensembles(config)) {
    EnsembleConfig ensemble_config{spec.name, {}};
    for (const auto& member : spec.members) {
      ensemble_config.members.push_back(member_path(ws, member));
    }
    const PredictionFile combined = ensemble(ensemble_config);
    const std::string out = rel(Stage::kEnsemble, spec.name + ".tsv");
    ws.write(out, format_predictions(combined));
    outputs.push_back(out);
    rows.push_back({spec.name, evaluate(combined, eval, train.seen_languages(),
                                        config.unseen_languages,
                                        config.group_mode)});
  }
  write_reports(ws, Stage::kEnsemble, rows, outputs);
  return outputs;
}

std::vector<std::string> execute(Stage stage, const PipelineConfig& config,
                                 const RunOptions& options) {
  const Workspace ws(config);
  switch (stage) {
    case Stage::kIngest:
      return run_ingest(config, ws);
    case Stage::kStats:
      return run_stats(config, ws);
    case Stage::kSample:
      return run_sample(config, ws);
    case Stage::kTranslate:
      return run_translate(config, ws, options);
    case Stage::kValidate:
      return run_validate(config, ws, options);
    case Stage::kSelect:
      return run_select(config, ws);
    case Stage::kAssemble:
      return run_assemble(config, ws);
    case Stage::kTrainReference:
      return run_train_reference(config, ws);
    case Stage::kPredict:
      return run_predict(config, ws);
    case Stage::kEvaluate:
      return run_evaluate(config, ws);
    case Stage::kEnsemble:
      return run_ensemble(config, ws);
  }
  return {};
}

}  // namespace

std::string beta_name(double beta) { return "beta_" + format_exact(beta); }

std::vector<std::string> PipelineConfig::systems() const {
  std::vector<std::string> names = {"baseline"};
  for (double beta : betas) names.push_back(beta_name(beta));
  return names;
}

void PipelineConfig::validate() const {
  auto fail = [](const std::string& message) {
    throw InvalidInput("config: " + message);
  };
  if (corpus_path.empty()) fail("corpus_path is required");
  if (output_dir.empty()) fail("output_dir is required");
  for (const auto& language : unseen_languages) {
    if (language.empty() || normalize_language(language) != language) {
      fail("unseen language '" + language + "' must be a lowercase code");
    }
  }
  SamplingConfig{threshold_p, boundary_inclusive}.validate();
  if (betas.empty()) fail("at least one beta is required");
  std::set<std::string> names;
  for (double beta : betas) {
    ValidationConfig{beta}.validate();
    if (!names.insert(beta_name(beta)).second) {
      fail("duplicate beta " + format_exact(beta));
    }
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    fail("validation_fraction must be in (0, 1)");
  }
  if (!(histogram_bin_width > 0.0) || !std::isfinite(histogram_bin_width)) {
    fail("histogram_bin_width must be positive");
  }
  const auto& t = translation;
  if (t.backend != "mock-identity" && t.backend != "mock-noisy" &&
      t.backend != "http") {
    fail("translation backend must be mock-identity, mock-noisy or http");
  }
  if (t.backend == "http" && t.http_url.empty()) {
    fail("translation http_url is required for the http backend");
  }
  if (t.backend == "http") HttpEndpoint::parse(t.http_url);
  if (!(t.noise_q >= 0.0 && t.noise_q <= 1.0)) fail("noise_q must be in [0, 1]");
  if (t.max_in_flight == 0) fail("max_in_flight must be >= 1");
  if (t.batch_size == 0) fail("translation batch_size must be >= 1");
  const auto& s = scorer;
  if (s.backend != "reference" && s.backend != "http") {
    fail("scorer backend must be reference or http");
  }
  if (s.backend == "http" && s.http_url.empty()) {
    fail("scorer http_url is required for the http backend");
  }
  if (s.backend == "http") HttpEndpoint::parse(s.http_url);
  if (!(s.l2 > 0.0) || !std::isfinite(s.l2)) fail("l2 must be positive");
  if (!(s.tolerance > 0.0 && s.tolerance <= 1e-6)) {
    fail("scorer tolerance must be in (0, 1e-6]");
  }
  if (s.batch_size == 0) fail("scorer batch_size must be >= 1");
  if (retry.max_attempts < 1) fail("retry max_attempts must be >= 1");
  if (retry.base.count() < 0 || !(retry.factor >= 1.0)) {
    fail("retry base must be >= 0 and factor >= 1");
  }
  std::set<std::string> ensemble_names;
  const auto system_names = systems();
  for (const auto& spec : ensembles) {
    if (spec.name.empty() || spec.name.find('/') != std::string::npos) {
      fail("ensemble names must be non-empty and contain no '/'");
    }
    if (!ensemble_names.insert(spec.name).second) {
      fail("duplicate ensemble '" + spec.name + "'");
    }
    if (spec.members.empty()) fail("ensemble '" + spec.name + "' has no members");
    for (const auto& member : spec.members) {
      if (!is_path_member(member) &&
          std::find(system_names.begin(), system_names.end(), member) ==
              system_names.end()) {
        fail("ensemble '" + spec.name + "' member '" + member +
             "' is neither a system name nor a .tsv file");
      }
    }
  }
}

PipelineConfig PipelineConfig::from_json(const json& doc) {
  reject_unknown(doc, "config",
                 {"corpus_path", "eval_path", "output_dir", "unseen_languages",
                  "threshold_p", "boundary_inclusive", "betas", "seed",
                  "validation_fraction", "histogram_bin_width", "group_mode",
                  "translation", "scorer", "retry", "ensembles"});
  PipelineConfig c;
  c.corpus_path = get_field(doc, "corpus_path", c.corpus_path);
  c.eval_path = get_field(doc, "eval_path", c.eval_path);
  c.output_dir = get_field(doc, "output_dir", c.output_dir);
  c.unseen_languages = get_field(doc, "unseen_languages", c.unseen_languages);
  c.threshold_p = get_field(doc, "threshold_p", c.threshold_p);
  c.boundary_inclusive = get_field(doc, "boundary_inclusive", c.boundary_inclusive);
  c.betas = get_field(doc, "betas", c.betas);
  c.seed = get_field(doc, "seed", c.seed);
  c.validation_fraction = get_field(doc, "validation_fraction", c.validation_fraction);
  c.histogram_bin_width = get_field(doc, "histogram_bin_width", c.histogram_bin_width);
  c.group_mode = parse_group_mode(
      get_field<std::string>(doc, "group_mode", "pooled"));
  if (doc.contains("translation")) {
    const json& t = doc["translation"];
    reject_unknown(t, "translation",
                   {"backend", "http_url", "noise_q", "single_back",
                    "max_in_flight", "batch_size"});
    auto& out = c.translation;
    out.backend = get_field(t, "backend", out.backend);
    out.http_url = get_field(t, "http_url", out.http_url);
    out.noise_q = get_field(t, "noise_q", out.noise_q);
    out.single_back = get_field(t, "single_back", out.single_back);
    out.max_in_flight = get_field(t, "max_in_flight", out.max_in_flight);
    out.batch_size = get_field(t, "batch_size", out.batch_size);
  }
  if (doc.contains("scorer")) {
    const json& s = doc["scorer"];
    reject_unknown(s, "scorer",
                   {"backend", "http_url", "l2", "tolerance", "batch_size"});
    auto& out = c.scorer;
    out.backend = get_field(s, "backend", out.backend);
    out.http_url = get_field(s, "http_url", out.http_url);
    out.l2 = get_field(s, "l2", out.l2);
    out.tolerance = get_field(s, "tolerance", out.tolerance);
    out.batch_size = get_field(s, "batch_size", out.batch_size);
  }
  if (doc.contains("retry")) {
    const json& r = doc["retry"];
    reject_unknown(r, "retry", {"base_ms", "factor", "max_attempts"});
    c.retry.base = std::chrono::milliseconds(
        get_field<long long>(r, "base_ms", c.retry.base.count()));
    c.retry.factor = get_field(r, "factor", c.retry.factor);
    c.retry.max_attempts = get_field(r, "max_attempts", c.retry.max_attempts);
  }
  if (doc.contains("ensembles")) {
    if (!doc["ensembles"].is_array()) {
      throw InvalidInput("config: 'ensembles' must be an array");
    }
    for (const auto& e : doc["ensembles"]) {
      reject_unknown(e, "ensembles[]", {"name", "members"});
      c.ensembles.push_back(
          {get_field<std::string>(e, "name", ""),
           get_field<std::vector<std::string>>(e, "members", {})});
    }
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  return from_json(doc);
}

json PipelineConfig::to_json() const {
  return {{"corpus_path", corpus_path},
          {"eval_path", eval_path},
          {"output_dir", output_dir},
          {"unseen_languages", unseen_languages},
          {"threshold_p", threshold_p},
          {"boundary_inclusive", boundary_inclusive},
          {"betas", betas},
          {"seed", seed},
          {"validation_fraction", validation_fraction},
          {"histogram_bin_width", histogram_bin_width},
          {"group_mode", group_mode_name(group_mode)},
          {"translation", translation_json(translation)},
          {"scorer", scorer_json(scorer)},
          {"retry",
           {{"base_ms", retry.base.count()},
            {"factor", retry.factor},
            {"max_attempts", retry.max_attempts}}},
          {"ensembles", ensembles_json(ensembles)}};
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> kStages = {
      Stage::kIngest,   Stage::kStats,          Stage::kSample,
      Stage::kTranslate, Stage::kValidate,      Stage::kSelect,
      Stage::kAssemble, Stage::kTrainReference, Stage::kPredict,
      Stage::kEvaluate, Stage::kEnsemble};
  return kStages;
}

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::kIngest: return "ingest";
    case Stage::kStats: return "stats";
    case Stage::kSample: return "sample";
    case Stage::kTranslate: return "translate";
    case Stage::kValidate: return "validate";
    case Stage::kSelect: return "select";
    case Stage::kAssemble: return "assemble";
    case Stage::kTrainReference: return "train-reference";
    case Stage::kPredict: return "predict";
    case Stage::kEvaluate: return "evaluate";
    case Stage::kEnsemble: return "ensemble";
  }
  return "unknown";
}

Stage parse_stage(std::string_view name) {
  for (Stage stage : all_stages()) {
    if (stage_name(stage) == name) return stage;
  }
  throw InvalidInput("unknown stage '" + std::string(name) + "'");
}

StageResult run_stage(Stage stage, const PipelineConfig& config,
                      const RunOptions& options) {
  config.validate();
  const Workspace ws(config);
  const std::string name = stage_name(stage);

  json input_hashes = json::object();
  for (const auto& input : stage_inputs(stage, config)) {
    if (!fs::is_regular_file(input.path)) {
      if (input.external) {
        throw InvalidInput(name + ": input file not found: " +
                           input.path.string());
      }
      throw MissingArtifact(name + ": missing upstream artifact " + input.key +
                            " (run the '" + stage_name(input.producer) +
                            "' stage first)");
    }
    input_hashes[input.key] = file_sha256(input.path.string());
  }
  const std::string config_hash = sha256_hex(stage_config(stage, config).dump());
  const std::string manifest_rel = rel(stage, "manifest.json");

  if (!options.force && fs::exists(ws.path(manifest_rel))) {
    json manifest;
    try {
      manifest = json::parse(ws.read(manifest_rel));
    } catch (const json::exception& e) {
      throw MissingArtifact(name + ": unreadable manifest: " + e.what());
    }
    if (manifest.value("config_hash", "") != config_hash) {
      throw InvalidInput(name + ": existing outputs in " +
                         ws.path(name).string() +
                         " were produced under a different configuration; "
                         "rerun with --force to replace them");
    }
    bool intact = manifest.value("inputs", json::object()) == input_hashes;
    std::vector<std::string> outputs;
    const json recorded = manifest.value("outputs", json::object());
    for (const auto& [relative, hash] : recorded.items()) {
      outputs.push_back(relative);
      if (!intact) break;
      intact = fs::is_regular_file(ws.path(relative)) &&
               file_sha256(ws.str(relative)) == hash.get<std::string>();
    }
    if (intact) {
      spdlog::info("{}: up to date", name);
      return {stage, false, outputs};
    }
  }

  spdlog::info("{}: running", name);
  fs::create_directories(ws.path(name));
  std::vector<std::string> outputs = execute(stage, config, options);
  json output_hashes = json::object();
  for (const auto& relative : outputs) {
    output_hashes[relative] = file_sha256(ws.str(relative));
  }
  const json manifest = {{"stage", name},
                         {"config_hash", config_hash},
                         {"inputs", input_hashes},
                         {"outputs", output_hashes}};
  ws.write(manifest_rel, manifest.dump(2) + "\n");
  return {stage, true, outputs};
}

std::vector<StageResult> run_pipeline(const PipelineConfig& config,
                                      const RunOptions& options) {
  std::vector<StageResult> results;
  for (Stage stage : all_stages()) {
    results.push_back(run_stage(stage, config, options));
  }
  return results;
}

}  // namespace wader
