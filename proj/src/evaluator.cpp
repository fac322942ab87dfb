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

#include "wader/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "json.hpp"
#include "spdlog/spdlog.h"
#include "wader/delimited.hpp"
#include "wader/error.hpp"
#include "wader/kernels.hpp"

namespace wader {
namespace {

std::string format_r(const std::optional<double>& r) {
  if (!r) return "n/a";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", *r);
  return buffer;
}

nlohmann::json r_json(const std::optional<double>& r) {
  return r ? nlohmann::json(*r) : nlohmann::json(nullptr);
}

// Unbiased integer in [0, bound) by rejection; portable unlike
// std::uniform_int_distribution.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

}  // namespace

std::optional<double> pearson_r(std::span<const double> x,
                                std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InvalidInput("pearson_r: length mismatch (" +
                       std::to_string(x.size()) + " vs " +
                       std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw InvalidInput("pearson_r: need at least 2 points");
  const kernels::PearsonSums s = kernels::parallel::pearson_sums(x, y);
  if (s.sxx == 0.0 || s.syy == 0.0) return std::nullopt;
  const double r = s.sxy / std::sqrt(s.sxx * s.syy);
  return std::clamp(r, -1.0, 1.0);
}

PredictionFile::PredictionFile(std::vector<Prediction> entries)
    : entries_(std::move(entries)) {
  std::set<std::string_view> ids;
  for (const auto& entry : entries_) {
    if (!ids.insert(entry.id).second) {
      throw InvalidInput("predictions: duplicate id '" + entry.id + "'");
    }
  }
}

std::map<std::string, double> PredictionFile::by_id() const {
  std::map<std::string, double> out;
  for (const auto& entry : entries_) out.emplace(entry.id, entry.score);
  return out;
}

std::string format_predictions(const PredictionFile& predictions) {
  std::string out;
  for (const auto& entry : predictions.entries()) {
    if (entry.id.find_first_of("\t\n") != std::string::npos) {
      throw InvalidInput("predictions: id contains a tab or newline");
    }
    out += entry.id;
    out.push_back('\t');
    out += format_exact(entry.score);
    out.push_back('\n');
  }
  return out;
}

PredictionFile parse_predictions(std::string_view content) {
  std::vector<Prediction> entries;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos ||
        line.find('\t', tab + 1) != std::string_view::npos) {
      throw InvalidInput("predictions line " + std::to_string(line_no) +
                         ": expected 'id<TAB>score'");
    }
    entries.push_back(
        {std::string(line.substr(0, tab)),
         parse_double(line.substr(tab + 1),
                      "predictions line " + std::to_string(line_no))});
  }
  return PredictionFile(std::move(entries));
}

PredictionFile load_predictions(const std::string& path) {
  try {
    return parse_predictions(read_file(path));
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void save_predictions(const PredictionFile& predictions,
                      const std::string& path) {
  write_file(path, format_predictions(predictions));
}

GroupMode parse_group_mode(std::string_view name) {
  if (name == "pooled") return GroupMode::kPooled;
  if (name == "average") return GroupMode::kAverage;
  throw InvalidInput("unknown group mode '" + std::string(name) +
                     "' (expected pooled or average)");
}

std::string_view group_mode_name(GroupMode mode) {
  return mode == GroupMode::kPooled ? "pooled" : "average";
}

EvaluationReport evaluate(const PredictionFile& predictions, const Corpus& gold,
                          const LanguageSet& seen, const LanguageSet& unseen,
                          GroupMode mode) {
  for (const auto& language : seen) {
    if (unseen.count(language) != 0) {
      throw InvalidInput("evaluate: language '" + language +
                         "' is both seen and unseen");
    }
  }
  const auto scores = predictions.by_id();
  std::vector<std::string> missing;
  std::set<std::string> gold_ids;
  for (const auto& item : gold.items()) {
    gold_ids.insert(item.id);
    if (scores.count(item.id) == 0) missing.push_back(item.id);
  }
  std::vector<std::string> unknown;
  for (const auto& entry : predictions.entries()) {
    if (gold_ids.count(entry.id) == 0) unknown.push_back(entry.id);
  }
  if (!missing.empty() || !unknown.empty()) {
    std::string message = "evaluate:";
    auto list = [&](const char* label, const std::vector<std::string>& ids) {
      if (ids.empty()) return;
      message += std::string(" ") + label + " (" + std::to_string(ids.size()) +
                 "):";
      for (const auto& id : ids) message += " " + id;
      message += ";";
    };
    list("missing predictions", missing);
    list("unknown prediction ids", unknown);
    throw InvalidInput(message);
  }

  struct Pairs {
    std::vector<double> predicted;
    std::vector<double> gold;
  };
  std::map<std::string, Pairs> by_language;
  Pairs all, seen_group, unseen_group;
  for (const auto& item : gold.items()) {
    const double p = scores.at(item.id);
    auto& pairs = by_language[item.language];
    pairs.predicted.push_back(p);
    pairs.gold.push_back(item.label);
    all.predicted.push_back(p);
    all.gold.push_back(item.label);
    Pairs& group = unseen.count(item.language) != 0 ? unseen_group : seen_group;
    group.predicted.push_back(p);
    group.gold.push_back(item.label);
  }

  auto safe_r = [](const Pairs& pairs) -> std::optional<double> {
    if (pairs.gold.size() < 2) return std::nullopt;
    return pearson_r(pairs.predicted, pairs.gold);
  };

  EvaluationReport report;
  report.mode = mode;
  LanguageSet seen_columns = seen;
  for (const auto& [language, pairs] : by_language) {
    report.per_language[language] = safe_r(pairs);
    report.counts[language] = pairs.gold.size();
    if (unseen.count(language) == 0) seen_columns.insert(language);
  }
  for (const auto& language : seen_columns) {
    report.seen_languages.push_back(language);
    report.per_language.try_emplace(language, std::nullopt);
    report.counts.try_emplace(language, 0);
  }
  for (const auto& language : unseen) {
    report.unseen_languages.push_back(language);
    report.per_language.try_emplace(language, std::nullopt);
    report.counts.try_emplace(language, 0);
  }

  auto average = [&](const std::vector<std::string>& languages)
      -> std::optional<double> {
    double total = 0.0;
    std::size_t defined = 0;
    for (const auto& language : languages) {
      const auto& r = report.per_language.at(language);
      if (r) {
        total += *r;
        ++defined;
      }
    }
    if (defined == 0) return std::nullopt;
    return total / static_cast<double>(defined);
  };

  if (mode == GroupMode::kPooled) {
    report.overall = safe_r(all);
    report.seen = safe_r(seen_group);
    report.unseen = safe_r(unseen_group);
  } else {
    std::vector<std::string> every = report.seen_languages;
    every.insert(every.end(), report.unseen_languages.begin(),
                 report.unseen_languages.end());
    report.overall = average(every);
    report.seen = average(report.seen_languages);
    report.unseen = average(report.unseen_languages);
  }
  return report;
}

std::string render_table(std::span<const NamedReport> rows) {
  std::vector<std::string> languages;
  for (const auto& row : rows) {
    for (const auto* group :
         {&row.report.seen_languages, &row.report.unseen_languages}) {
      for (const auto& language : *group) {
        if (std::find(languages.begin(), languages.end(), language) ==
            languages.end()) {
          languages.push_back(language);
        }
      }
    }
  }
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {"System", "Overall", "Seen", "Unseen"};
  header.insert(header.end(), languages.begin(), languages.end());
  cells.push_back(header);
  for (const auto& row : rows) {
    std::vector<std::string> line = {row.system, format_r(row.report.overall),
                                     format_r(row.report.seen),
                                     format_r(row.report.unseen)};
    for (const auto& language : languages) {
      const auto it = row.report.per_language.find(language);
      line.push_back(it == row.report.per_language.end() ? "n/a"
                                                         : format_r(it->second));
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      width[c] = std::max(width[c], line[c].size());
    }
  }
  std::string out;
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c == 0) {
        out += line[c] + std::string(width[c] - line[c].size(), ' ');
      } else {
        out += "  " + std::string(width[c] - line[c].size(), ' ') + line[c];
      }
    }
    out.push_back('\n');
  }
  return out;
}

std::string render_json(std::span<const NamedReport> rows) {
  nlohmann::ordered_json systems = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    const EvaluationReport& report = row.report;
    nlohmann::ordered_json entry;
    entry["system"] = row.system;
    entry["group_mode"] = std::string(group_mode_name(report.mode));
    entry["overall"] = r_json(report.overall);
    entry["seen"] = r_json(report.seen);
    entry["unseen"] = r_json(report.unseen);
    nlohmann::ordered_json per_language = nlohmann::ordered_json::object();
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (const auto* group : {&report.seen_languages, &report.unseen_languages}) {
      for (const auto& language : *group) {
        per_language[language] = r_json(report.per_language.at(language));
        counts[language] = report.counts.at(language);
      }
    }
    entry["per_language"] = per_language;
    entry["counts"] = counts;
    entry["seen_languages"] = report.seen_languages;
    entry["unseen_languages"] = report.unseen_languages;
    systems.push_back(entry);
  }
  nlohmann::ordered_json doc;
  doc["systems"] = systems;
  return doc.dump(2) + "\n";
}

SplitResult split(const Corpus& corpus, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidInput("split: fraction must be in (0, 1), got " +
                       format_exact(fraction));
  }
  std::map<std::string, std::vector<std::size_t>> positions;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    positions[corpus.items()[i].language].push_back(i);
  }

  SplitResult result;
  std::mt19937_64 rng(seed);
  std::vector<bool> held_out(corpus.size(), false);
  for (auto& [language, indices] : positions) {
    const std::size_t count = indices.size();
    if (count < 2) {
      result.warnings.push_back("language '" + language +
                                "' has a single item; kept in train");
      continue;
    }
    auto take = static_cast<std::size_t>(
        std::llround(static_cast<double>(count) * fraction));
    take = std::clamp<std::size_t>(take, 1, count);
    // Partial Fisher-Yates: the first `take` slots are the sample.
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + bounded(rng, count - i);
      std::swap(indices[i], indices[j]);
      held_out[indices[i]] = true;
    }
  }
  for (const auto& warning : result.warnings) spdlog::warn("split: {}", warning);

  std::vector<LabeledText> train, validation;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (held_out[i] ? validation : train).push_back(corpus.items()[i]);
  }
  result.train = Corpus(std::move(train), corpus.unseen_languages());
  result.validation = Corpus(std::move(validation), corpus.unseen_languages());
  return result;
}

}  // namespace wader
