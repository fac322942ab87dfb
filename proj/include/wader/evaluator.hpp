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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wader/corpus.hpp"
#include "wader/scorer.hpp"

namespace wader {

// Pearson's r by the deviation formula
//   sum (x - mx)(y - my) / sqrt(sum (x - mx)^2 * sum (y - my)^2).
// nullopt when either input is constant. Throws InvalidInput on a length
// mismatch or fewer than two points.
std::optional<double> pearson_r(std::span<const double> x,
                                std::span<const double> y);

class PredictionFile {
 public:
  PredictionFile() = default;
  // Throws InvalidInput on duplicate ids.
  explicit PredictionFile(std::vector<Prediction> entries);

  const std::vector<Prediction>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::map<std::string, double> by_id() const;

 private:
  std::vector<Prediction> entries_;
};

// Tab-separated id and score, no header. Scores keep full precision.
std::string format_predictions(const PredictionFile& predictions);
PredictionFile parse_predictions(std::string_view content);
PredictionFile load_predictions(const std::string& path);
void save_predictions(const PredictionFile& predictions,
                      const std::string& path);

enum class GroupMode {
  kPooled,   // one r over all items of the group
  kAverage,  // mean of the defined per-language r values
};

GroupMode parse_group_mode(std::string_view name);
std::string_view group_mode_name(GroupMode mode);

struct EvaluationReport {
  GroupMode mode = GroupMode::kPooled;
  std::optional<double> overall;
  std::optional<double> seen;
  std::optional<double> unseen;
  std::map<std::string, std::optional<double>> per_language;
  std::map<std::string, std::size_t> counts;
  // Column order: seen languages, then unseen, each sorted.
  std::vector<std::string> seen_languages;
  std::vector<std::string> unseen_languages;
};

// Every gold id needs a prediction and every prediction a gold id; the
// error lists all offenders. Gold languages outside `unseen` count as seen.
EvaluationReport evaluate(const PredictionFile& predictions, const Corpus& gold,
                          const LanguageSet& seen, const LanguageSet& unseen,
                          GroupMode mode = GroupMode::kPooled);

struct NamedReport {
  std::string system;
  EvaluationReport report;
};

// Aligned text table: System, Overall, Seen, Unseen, then languages.
// Undefined values print as "n/a".
std::string render_table(std::span<const NamedReport> rows);
// JSON document with the same fields; undefined values are null.
std::string render_json(std::span<const NamedReport> rows);

struct SplitResult {
  Corpus train;
  Corpus validation;
  std::vector<std::string> warnings;
};

// Per-language stratified hold-out: round(count * fraction) items of each
// language (at least 1 when the language has >= 2 items), drawn without
// replacement with a seeded generator. Both halves keep corpus order.
SplitResult split(const Corpus& corpus, double fraction, std::uint64_t seed);

}  // namespace wader
