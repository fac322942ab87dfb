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

#include "wader/validator.hpp"

#include <cmath>
#include <set>
#include <unordered_set>

#include "wader/delimited.hpp"
#include "wader/error.hpp"

namespace wader {

void ValidationConfig::validate() const {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw InvalidInput("beta must be a non-negative number, got " +
                       format_exact(beta));
  }
}

DedupResult deduplicate(std::vector<AugmentedExample> examples) {
  DedupResult result;
  std::set<std::pair<std::string, std::string>> seen;
  for (auto& example : examples) {
    if (seen.emplace(example.text, example.language).second) {
      result.kept.push_back(std::move(example));
    } else {
      ++result.removed;
    }
  }
  return result;
}

ValidationAborted::ValidationAborted(const BackendError& cause,
                                     std::vector<ValidatedExample> partial)
    : BackendError(cause.failure(),
                   std::string(cause.what()) + " (validated " +
                       std::to_string(partial.size()) + " before failing)"),
      partial_(std::move(partial)) {}

std::vector<ValidatedExample> validate(
    std::span<const AugmentedExample> examples, ScorerBackend& scorer,
    ValidateOptions options) {
  if (options.resume_from > examples.size() ||
      options.resumed.size() != options.resume_from) {
    throw InvalidInput("validate: resume cursor does not match input");
  }
  std::vector<ValidatedExample> validated = std::move(options.resumed);
  validated.reserve(examples.size());
  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  for (std::size_t begin = options.resume_from; begin < examples.size();
       begin += batch) {
    const std::size_t end = std::min(examples.size(), begin + batch);
    std::vector<ScoreItem> items;
    items.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      items.push_back(
          {examples[i].id, examples[i].text, examples[i].language});
    }
    std::vector<Prediction> predictions;
    try {
      predictions = predict(scorer, items, batch);
    } catch (const BackendError& e) {
      throw ValidationAborted(e, std::move(validated));
    }
    for (std::size_t i = begin; i < end; ++i) {
      const double predicted = predictions[i - begin].score;
      validated.push_back({examples[i], predicted,
                           std::abs(predicted - examples[i].derived_label)});
    }
  }
  return validated;
}

Summary difference_stats(std::span<const ValidatedExample> validated) {
  if (validated.empty()) {
    throw InvalidInput("difference_stats: no validated examples");
  }
  std::vector<double> differences;
  differences.reserve(validated.size());
  for (const auto& v : validated) differences.push_back(v.difference);
  return summarize(differences);
}

std::vector<ValidatedExample> select_by_difference(
    std::span<const ValidatedExample> validated, double beta) {
  ValidationConfig{beta}.validate();
  std::vector<ValidatedExample> selected;
  for (const auto& v : validated) {
    if (v.difference <= beta) selected.push_back(v);
  }
  return selected;
}

Corpus assemble_training_set(const Corpus& gold,
                             std::span<const ValidatedExample> selected) {
  std::unordered_set<std::string> ids;
  for (const auto& item : gold.items()) ids.insert(item.id);
  std::vector<LabeledText> items = gold.items();
  items.reserve(items.size() + selected.size());
  LanguageSet unseen = gold.unseen_languages();
  for (const auto& v : selected) {
    if (!ids.insert(v.example.id).second) {
      throw InvalidInput("assemble: id collision on '" + v.example.id + "'");
    }
    items.push_back({v.example.id, v.example.text, v.example.language,
                     v.example.derived_label});
    unseen.erase(v.example.language);
  }
  return Corpus(std::move(items), std::move(unseen));
}

std::string format_validated(std::span<const ValidatedExample> validated) {
  std::string out;
  write_row(out,
            {"id", "text", "language", "derived_label", "predicted_label",
             "difference", "source_id", "path"},
            ',');
  for (const auto& v : validated) {
    const AugmentedExample& e = v.example;
    write_row(out,
              {e.id, e.text, e.language, format_exact(e.derived_label),
               format_exact(v.predicted_label), format_exact(v.difference),
               e.source_id, join_path(e.path)},
              ',');
  }
  return out;
}

std::vector<ValidatedExample> parse_validated(std::string_view content) {
  const DelimitedTable table = parse_delimited(content);
  const Row expected = {"id",         "text",       "language",
                        "derived_label", "predicted_label", "difference",
                        "source_id",  "path"};
  if (table.header != expected) {
    throw InvalidInput("validated file: unexpected header");
  }
  std::vector<ValidatedExample> validated;
  validated.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const Row& row = table.rows[r];
    if (row.size() != expected.size()) {
      throw InvalidInput("validated file: row " + std::to_string(r + 1) +
                         " has " + std::to_string(row.size()) + " fields");
    }
    ValidatedExample v;
    v.example = {row[0], row[1], row[2], parse_double(row[3], "derived_label"),
                 row[6], split_path(row[7])};
    v.predicted_label = parse_double(row[4], "predicted_label");
    v.difference = parse_double(row[5], "difference");
    validated.push_back(std::move(v));
  }
  return validated;
}

}  // namespace wader
