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

#include <map>
#include <set>
#include <string>
#include <vector>

#include "wader/stats.hpp"

namespace wader {

using LanguageSet = std::set<std::string>;

inline constexpr double kMinLabel = 1.0;
inline constexpr double kMaxLabel = 5.0;

// One text with its language tag and a 1-5 Likert intimacy score.
struct LabeledText {
  std::string id;
  std::string text;
  std::string language;
  double label = kMinLabel;

  friend bool operator==(const LabeledText&, const LabeledText&) = default;
};

// Immutable ordered collection of labeled texts. The seen languages are the
// languages of the items; unseen languages are configured target-only tags.
class Corpus {
 public:
  Corpus() = default;
  // Validates every invariant: labels in [1,5], non-blank text, non-empty
  // language, unique ids, and seen/unseen disjoint. Throws InvalidInput.
  explicit Corpus(std::vector<LabeledText> items, LanguageSet unseen = {});

  const std::vector<LabeledText>& items() const { return items_; }
  const LanguageSet& seen_languages() const { return seen_; }
  const LanguageSet& unseen_languages() const { return unseen_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  std::vector<double> labels() const;
  std::vector<double> labels(const std::string& language) const;

 private:
  std::vector<LabeledText> items_;
  LanguageSet seen_;
  LanguageSet unseen_;
};

// Maps task language names ("English", "Chinese", ...) to ISO-639-1 codes;
// anything else is lowercased and trimmed.
std::string normalize_language(std::string_view tag);

// Reads the delimited corpus layout: header with text, label, language and
// an optional id column. Missing ids become "{language}-{row_index}".
Corpus load_corpus(const std::string& path, LanguageSet unseen = {});
Corpus parse_corpus(std::string_view content, LanguageSet unseen = {});

// Writes id, text, label, language with labels at up to 6 decimals.
std::string format_corpus(const Corpus& corpus, char delimiter = ',');
void write_corpus(const Corpus& corpus, const std::string& path,
                  char delimiter = ',');

struct LabelStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
};

struct CorpusStats {
  std::map<std::string, LabelStats> per_language;
  LabelStats overall;
};

CorpusStats describe(const Corpus& corpus);

struct HistogramBin {
  double lower = 0.0;
  std::size_t count = 0;
  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

// Bins of width `bin_width` from 1.0 covering [1,5]; the last bin may be
// narrower and is closed on the right. Unseen languages get all-zero bins.
std::map<std::string, std::vector<HistogramBin>> histogram(
    const Corpus& corpus, double bin_width);

}  // namespace wader
