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

#include "wader/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

#include "wader/delimited.hpp"
#include "wader/error.hpp"

namespace wader {
namespace {

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

LabelStats to_label_stats(const Summary& s) {
  return {s.count, s.mean, s.std_dev, s.p25, s.p50, s.p75};
}

// Small slack so labels that sit on a bin edge (1.3 with width 0.1) land in
// the higher bin despite binary rounding of the quotient.
constexpr double kEdgeSlack = 1e-9;

}  // namespace

Corpus::Corpus(std::vector<LabeledText> items, LanguageSet unseen)
    : items_(std::move(items)), unseen_(std::move(unseen)) {
  std::unordered_set<std::string> ids;
  ids.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const LabeledText& item = items_[i];
    const std::string where = "item " + std::to_string(i) + " (id '" +
                              item.id + "')";
    if (!std::isfinite(item.label) || item.label < kMinLabel ||
        item.label > kMaxLabel) {
      throw InvalidInput(where + ": label " + format_exact(item.label) +
                         " outside [1, 5]");
    }
    if (is_blank(item.text)) throw InvalidInput(where + ": empty text");
    if (item.language.empty()) throw InvalidInput(where + ": empty language");
    if (item.id.empty()) throw InvalidInput(where + ": empty id");
    if (!ids.insert(item.id).second) {
      throw InvalidInput(where + ": duplicate id");
    }
    seen_.insert(item.language);
  }
  for (const auto& language : unseen_) {
    if (seen_.count(language) != 0) {
      throw InvalidInput("language '" + language +
                         "' is both seen and unseen");
    }
  }
}

std::vector<double> Corpus::labels() const {
  std::vector<double> out;
  out.reserve(items_.size());
  for (const auto& item : items_) out.push_back(item.label);
  return out;
}

std::vector<double> Corpus::labels(const std::string& language) const {
  std::vector<double> out;
  for (const auto& item : items_) {
    if (item.language == language) out.push_back(item.label);
  }
  return out;
}

std::string normalize_language(std::string_view tag) {
  std::string lowered;
  for (char c : tag) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      lowered.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  static const std::map<std::string, std::string, std::less<>> kNames = {
      {"arabic", "ar"},  {"chinese", "zh"},    {"dutch", "nl"},
      {"english", "en"}, {"french", "fr"},     {"hindi", "hi"},
      {"italian", "it"}, {"korean", "ko"},     {"portuguese", "pt"},
      {"spanish", "es"},
  };
  const auto it = kNames.find(lowered);
  return it != kNames.end() ? it->second : lowered;
}

Corpus parse_corpus(std::string_view content, LanguageSet unseen) {
  const DelimitedTable table = parse_delimited(content);
  int id_col = -1;
  int text_col = -1;
  int label_col = -1;
  int language_col = -1;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    std::string name = table.header[c];
    std::transform(name.begin(), name.end(), name.begin(), [](char ch) {
      return static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    });
    const int col = static_cast<int>(c);
    if (name == "id" && c == 0) {
      id_col = col;
    } else if (name == "text" && text_col < 0) {
      text_col = col;
    } else if (name == "label" && label_col < 0) {
      label_col = col;
    } else if (name == "language" && language_col < 0) {
      language_col = col;
    } else {
      throw InvalidInput("unexpected column '" + table.header[c] +
                         "' in corpus header");
    }
  }
  if (text_col < 0) throw InvalidInput("missing required column 'text'");
  if (label_col < 0) throw InvalidInput("missing required column 'label'");
  if (language_col < 0) {
    throw InvalidInput("missing required column 'language'");
  }

  std::vector<LabeledText> items;
  items.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const Row& row = table.rows[r];
    const std::string where = "row " + std::to_string(r + 1) + " (line " +
                              std::to_string(table.lines[r]) + ")";
    if (row.size() != table.header.size()) {
      throw InvalidInput(where + ": expected " +
                         std::to_string(table.header.size()) +
                         " fields, found " + std::to_string(row.size()));
    }
    LabeledText item;
    item.text = row[text_col];
    item.language = normalize_language(row[language_col]);
    try {
      item.label = parse_double(row[label_col], "label");
    } catch (const InvalidInput& e) {
      throw InvalidInput(where + ": " + e.what());
    }
    if (!std::isfinite(item.label) || item.label < kMinLabel ||
        item.label > kMaxLabel) {
      throw InvalidInput(where + ": label " + row[label_col] +
                         " outside [1, 5]");
    }
    if (is_blank(item.text)) throw InvalidInput(where + ": empty text");
    if (item.language.empty()) throw InvalidInput(where + ": empty language");
    item.id = id_col >= 0 ? row[id_col]
                          : item.language + "-" + std::to_string(r);
    if (item.id.empty()) throw InvalidInput(where + ": empty id");
    items.push_back(std::move(item));
  }
  try {
    return Corpus(std::move(items), std::move(unseen));
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("corpus: ") + e.what());
  }
}

Corpus load_corpus(const std::string& path, LanguageSet unseen) {
  const std::string content = read_file(path);
  try {
    return parse_corpus(content, std::move(unseen));
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

std::string format_corpus(const Corpus& corpus, char delimiter) {
  std::string out;
  write_row(out, {"id", "text", "label", "language"}, delimiter);
  for (const auto& item : corpus.items()) {
    write_row(out, {item.id, item.text, format_exact(item.label), item.language},
              delimiter);
  }
  return out;
}

void write_corpus(const Corpus& corpus, const std::string& path,
                  char delimiter) {
  write_file(path, format_corpus(corpus, delimiter));
}

CorpusStats describe(const Corpus& corpus) {
  if (corpus.empty()) throw InvalidInput("describe: empty corpus");
  CorpusStats stats;
  for (const auto& language : corpus.seen_languages()) {
    const auto labels = corpus.labels(language);
    stats.per_language[language] = to_label_stats(summarize(labels));
  }
  stats.overall = to_label_stats(summarize(corpus.labels()));
  return stats;
}

std::map<std::string, std::vector<HistogramBin>> histogram(
    const Corpus& corpus, double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw InvalidInput("histogram: bin width must be positive");
  }
  const double span = kMaxLabel - kMinLabel;
  const auto bins = static_cast<std::size_t>(
      std::max(1.0, std::ceil(span / bin_width - kEdgeSlack)));
  std::vector<HistogramBin> empty(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    empty[b].lower = kMinLabel + static_cast<double>(b) * bin_width;
  }

  std::map<std::string, std::vector<HistogramBin>> result;
  for (const auto& language : corpus.seen_languages()) result[language] = empty;
  for (const auto& language : corpus.unseen_languages()) {
    result[language] = empty;
  }
  for (const auto& item : corpus.items()) {
    const double position = (item.label - kMinLabel) / bin_width + kEdgeSlack;
    const auto bin = std::min(bins - 1, static_cast<std::size_t>(position));
    ++result[item.language][bin].count;
  }
  return result;
}

}  // namespace wader
