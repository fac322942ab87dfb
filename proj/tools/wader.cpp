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

// wader: command-line front end for the augmentation pipeline.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"
#include "wader/delimited.hpp"
#include "wader/ensembler.hpp"
#include "wader/error.hpp"
#include "wader/evaluator.hpp"
#include "wader/pipeline.hpp"

namespace {

constexpr char kVersion[] = "0.1.0";

// Flags shared by every stage subcommand; unset values leave the config alone.
struct Overrides {
  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::string> corpus;
  std::optional<std::string> eval_corpus;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> unseen;
  std::optional<double> threshold_p;
  std::optional<std::string> boundary_inclusive;
  std::optional<std::string> backend;
  std::optional<std::string> http_url;
  std::optional<double> noise_q;
  bool single_back = false;
  std::optional<std::size_t> max_in_flight;
  std::vector<double> betas;
  std::optional<std::string> scorer;
  std::optional<std::string> scorer_url;
  std::optional<double> l2;
  std::optional<std::string> group_mode;
  std::optional<double> validation_fraction;
  bool force = false;
};

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw wader::InvalidInput("expected true or false, got '" + text + "'");
}

void add_shared_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--config", o.config_path, "pipeline config (JSON)");
  cmd.add_option("--output-dir", o.output_dir, "directory for stage outputs");
  cmd.add_option("--corpus", o.corpus, "gold corpus (CSV or TSV)");
  cmd.add_option("--eval-corpus", o.eval_corpus,
                 "evaluation corpus; defaults to the held-out split");
  cmd.add_option("--seed", o.seed, "seed for split and mock translation");
  cmd.add_option("--unseen", o.unseen, "unseen language codes")
      ->delimiter(',');
  cmd.add_option("--threshold-p", o.threshold_p, "candidate label threshold");
  cmd.add_option("--boundary-inclusive", o.boundary_inclusive,
                 "keep labels equal to the threshold (true|false)");
  cmd.add_option("--backend", o.backend, "translation backend")
      ->check(CLI::IsMember({"mock-identity", "mock-noisy", "http"}));
  cmd.add_option("--http-url", o.http_url, "translation service base URL");
  cmd.add_option("--noise-q", o.noise_q, "token drop probability (mock-noisy)");
  cmd.add_flag("--single-back", o.single_back,
               "back-translate through the first pivot only");
  cmd.add_option("--max-in-flight", o.max_in_flight,
                 "concurrent translation batches");
  cmd.add_option("--beta", o.betas, "selection threshold (repeatable)");
  cmd.add_option("--scorer", o.scorer, "scorer backend")
      ->check(CLI::IsMember({"reference", "http"}));
  cmd.add_option("--scorer-url", o.scorer_url, "scorer service base URL");
  cmd.add_option("--l2", o.l2, "ridge penalty of the reference scorer");
  cmd.add_option("--group-mode", o.group_mode,
                 "seen/unseen correlation grouping")
      ->check(CLI::IsMember({"pooled", "average"}));
  cmd.add_option("--validation-fraction", o.validation_fraction,
                 "held-out fraction per language");
  cmd.add_flag("--force", o.force, "re-run and overwrite existing outputs");
}

wader::PipelineConfig build_config(const Overrides& o) {
  wader::PipelineConfig c;
  if (!o.config_path.empty()) c = wader::PipelineConfig::load(o.config_path);
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.corpus) c.corpus_path = *o.corpus;
  if (o.eval_corpus) c.eval_path = *o.eval_corpus;
  if (o.seed) c.seed = *o.seed;
  if (!o.unseen.empty()) {
    c.unseen_languages.clear();
    for (const auto& language : o.unseen) {
      c.unseen_languages.insert(wader::normalize_language(language));
    }
  }
  if (o.threshold_p) c.threshold_p = *o.threshold_p;
  if (o.boundary_inclusive) {
    c.boundary_inclusive = parse_bool(*o.boundary_inclusive);
  }
  if (o.backend) c.translation.backend = *o.backend;
  if (o.http_url) c.translation.http_url = *o.http_url;
  if (o.noise_q) c.translation.noise_q = *o.noise_q;
  if (o.single_back) c.translation.single_back = true;
  if (o.max_in_flight) c.translation.max_in_flight = *o.max_in_flight;
  if (!o.betas.empty()) c.betas = o.betas;
  if (o.scorer) c.scorer.backend = *o.scorer;
  if (o.scorer_url) c.scorer.http_url = *o.scorer_url;
  if (o.l2) c.scorer.l2 = *o.l2;
  if (o.group_mode) c.group_mode = wader::parse_group_mode(*o.group_mode);
  if (o.validation_fraction) c.validation_fraction = *o.validation_fraction;
  c.validate();
  return c;
}

void report(const wader::StageResult& result) {
  std::cout << wader::stage_name(result.stage) << ": "
            << (result.executed ? "done" : "up to date") << "\n";
  for (const auto& output : result.outputs) std::cout << "  " << output << "\n";
}

nlohmann::ordered_json describe_app(const CLI::App& app) {
  nlohmann::ordered_json doc;
  doc["name"] = app.get_name();
  doc["description"] = app.get_description();
  nlohmann::ordered_json options = nlohmann::ordered_json::array();
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty()) continue;
    nlohmann::ordered_json entry;
    entry["name"] = "--" + opt->get_lnames().front();
    entry["description"] = opt->get_description();
    entry["takes_value"] = opt->get_items_expected_max() > 0;
    entry["repeatable"] = opt->get_expected_max() > 1;
    options.push_back(entry);
  }
  doc["options"] = options;
  nlohmann::ordered_json subcommands = nlohmann::ordered_json::array();
  for (const CLI::App* sub : app.get_subcommands({})) {
    subcommands.push_back(describe_app(*sub));
  }
  if (!subcommands.empty()) doc["subcommands"] = subcommands;
  return doc;
}

int run_standalone_ensemble(const std::string& manifest,
                            const std::string& preset,
                            const std::string& preset_dir,
                            const std::string& out) {
  const wader::EnsembleConfig config =
      manifest.empty() ? wader::ensemble_preset(preset, preset_dir)
                       : wader::load_ensemble_manifest(manifest);
  const wader::PredictionFile combined = wader::ensemble(config);
  if (out.empty() || out == "-") {
    std::cout << wader::format_predictions(combined);
  } else {
    wader::save_predictions(combined, out);
    std::cout << config.name << ": " << combined.size() << " predictions -> "
              << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("wader");
  spdlog::set_default_logger(logger);

  CLI::App app{"Weak-label data augmentation for text regression"};
  app.set_version_flag("--version", std::string("wader ") + kVersion);
  bool help_json = false;
  app.add_flag("--help-json", help_json,
               "print every subcommand and option as JSON and exit");
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_flag("-q,--quiet", quiet, "warnings and errors only");

  Overrides overrides;
  struct StageCommand {
    CLI::App* app;
    std::optional<wader::Stage> stage;  // empty: run all
  };
  std::vector<StageCommand> commands;
  for (wader::Stage stage : wader::all_stages()) {
    CLI::App* cmd = app.add_subcommand(wader::stage_name(stage),
                                       "run the " + wader::stage_name(stage) +
                                           " stage");
    add_shared_options(*cmd, overrides);
    commands.push_back({cmd, stage});
  }
  CLI::App* pipeline = app.add_subcommand("pipeline", "run every stage in order");
  add_shared_options(*pipeline, overrides);
  commands.push_back({pipeline, std::nullopt});

  std::string manifest;
  std::string preset;
  std::string preset_dir = ".";
  std::string out;
  CLI::App* ensemble_cmd = app.get_subcommand("ensemble");
  auto* manifest_opt = ensemble_cmd->add_option(
      "--manifest", manifest, "standalone: ensemble manifest (JSON)");
  auto* preset_opt =
      ensemble_cmd->add_option("--preset", preset, "standalone: named preset")
          ->check(CLI::IsMember(wader::ensemble_preset_names()));
  manifest_opt->excludes(preset_opt);
  ensemble_cmd->add_option("--preset-dir", preset_dir,
                           "directory holding the preset member files");
  ensemble_cmd->add_option("--out", out,
                           "standalone: output prediction file (- for stdout)");

  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(wader::ExitCode::kInvalidInput);
  }

  if (help_json) {
    std::cout << describe_app(app).dump(2) << "\n";
    return 0;
  }
  if (quiet) spdlog::set_level(spdlog::level::warn);
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (!manifest.empty() || !preset.empty()) {
      return run_standalone_ensemble(manifest, preset, preset_dir, out);
    }
    for (const auto& command : commands) {
      if (!command.app->parsed()) continue;
      const wader::PipelineConfig config = build_config(overrides);
      wader::RunOptions options;
      options.force = overrides.force;
      if (command.stage) {
        report(wader::run_stage(*command.stage, config, options));
      } else {
        for (const auto& result : wader::run_pipeline(config, options)) {
          report(result);
        }
      }
      return 0;
    }
    std::cout << app.help();
    return static_cast<int>(wader::ExitCode::kInvalidInput);
  } catch (const wader::Error& e) {
    spdlog::error("{}", e.what());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return static_cast<int>(wader::ExitCode::kInvalidInput);
  }
}
