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

#include "wader/ensembler.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

#include "json.hpp"
#include "wader/delimited.hpp"
#include "wader/error.hpp"

namespace wader {

void EnsembleConfig::validate() const {
  if (members.empty()) {
    throw InvalidInput("ensemble '" + name + "' has no members");
  }
}

EnsembleConfig load_ensemble_manifest(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  EnsembleConfig config;
  try {
    config.name = doc.at("name").get<std::string>();
    config.members = doc.at("members").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();
  for (auto& member : config.members) {
    if (std::filesystem::path(member).is_relative()) {
      member = (base / member).string();
    }
  }
  config.validate();
  return config;
}

PredictionFile ensemble(std::span<const PredictionFile> members) {
  if (members.empty()) throw InvalidInput("ensemble: no members");
  std::vector<std::map<std::string, double>> lookup;
  lookup.reserve(members.size());
  for (const auto& member : members) lookup.push_back(member.by_id());

  auto ids = [](const std::map<std::string, double>& m) {
    std::vector<std::string> out;
    out.reserve(m.size());
    for (const auto& [id, score] : m) out.push_back(id);
    return out;
  };
  const std::vector<std::string> first_ids = ids(lookup[0]);
  for (std::size_t m = 1; m < members.size(); ++m) {
    const std::vector<std::string> other_ids = ids(lookup[m]);
    std::vector<std::string> only_first, only_other;
    std::set_difference(first_ids.begin(), first_ids.end(), other_ids.begin(),
                        other_ids.end(), std::back_inserter(only_first));
    std::set_difference(other_ids.begin(), other_ids.end(), first_ids.begin(),
                        first_ids.end(), std::back_inserter(only_other));
    if (!only_first.empty() || !only_other.empty()) {
      std::string message = "ensemble: member 0 and member " +
                            std::to_string(m) + " differ in ids:";
      for (const auto& id : only_first) message += " -" + id;
      for (const auto& id : only_other) message += " +" + id;
      throw InvalidInput(message);
    }
  }

  std::vector<Prediction> out;
  out.reserve(members[0].size());
  std::vector<double> scores(members.size());
  for (const auto& entry : members[0].entries()) {
    for (std::size_t m = 0; m < members.size(); ++m) {
      scores[m] = lookup[m].at(entry.id);
    }
    std::sort(scores.begin(), scores.end());
    double mean = 0.0;
    for (std::size_t k = 0; k < scores.size(); ++k) {
      mean += (scores[k] - mean) / static_cast<double>(k + 1);
    }
    out.push_back({entry.id, clamp(mean)});
  }
  return PredictionFile(std::move(out));
}

PredictionFile ensemble(const EnsembleConfig& config) {
  config.validate();
  std::vector<PredictionFile> members;
  members.reserve(config.members.size());
  for (const auto& path : config.members) {
    try {
      members.push_back(load_predictions(path));
    } catch (const InvalidInput& e) {
      throw InvalidInput("ensemble '" + config.name +
                         "': unreadable member: " + e.what());
    }
  }
  return ensemble(members);
}

std::vector<std::string> ensemble_preset_names() {
  return {"ensemble-1", "ensemble-2", "ensemble-3",
          "ensemble-4", "ensemble-5", "ensemble-6"};
}

EnsembleConfig ensemble_preset(const std::string& name,
                               const std::string& directory) {
  const std::vector<std::string> betas = {"0.1", "0.2", "0.3"};
  auto file = [&](const std::string& model, const std::string& beta) {
    return (std::filesystem::path(directory) /
            (model + "_beta" + beta + ".tsv"))
        .string();
  };
  EnsembleConfig config{name, {}};
  if (name == "ensemble-1" || name == "ensemble-6") {
    for (const auto& beta : betas) config.members.push_back(file("xlmr", beta));
  }
  if (name == "ensemble-2" || name == "ensemble-6") {
    for (const auto& beta : betas) config.members.push_back(file("xlnet", beta));
  }
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (name == "ensemble-" + std::to_string(3 + i)) {
      config.members = {file("xlmr", betas[i]), file("xlnet", betas[i])};
    }
  }
  if (config.members.empty()) {
    throw InvalidInput("unknown ensemble preset '" + name + "'");
  }
  return config;
}

}  // namespace wader
