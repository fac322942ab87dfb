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

#include <span>
#include <string>
#include <vector>

#include "wader/corpus.hpp"
#include "wader/error.hpp"
#include "wader/scorer.hpp"
#include "wader/stats.hpp"
#include "wader/translator.hpp"

namespace wader {

struct ValidatedExample {
  AugmentedExample example;
  double predicted_label = kMinLabel;
  double difference = 0.0;  // |predicted_label - derived_label|

  friend bool operator==(const ValidatedExample&,
                         const ValidatedExample&) = default;
};

struct ValidationConfig {
  double beta = 0.3;
  // Throws InvalidInput for negative or non-finite beta.
  void validate() const;
};

struct DedupResult {
  std::vector<AugmentedExample> kept;
  std::size_t removed = 0;
};

// Keeps the first example of every exact (text, language) pair.
DedupResult deduplicate(std::vector<AugmentedExample> examples);

struct ValidateOptions {
  std::size_t batch_size = 32;
  // Number of leading examples already validated in `resumed`.
  std::size_t resume_from = 0;
  std::vector<ValidatedExample> resumed;
};

// Thrown when the scorer fails mid-run; holds every example validated so
// far. cursor() is where a resumed run starts.
class ValidationAborted : public BackendError {
 public:
  ValidationAborted(const BackendError& cause,
                    std::vector<ValidatedExample> partial);
  const std::vector<ValidatedExample>& partial() const { return partial_; }
  std::size_t cursor() const { return partial_.size(); }

 private:
  std::vector<ValidatedExample> partial_;
};

// Scores every example with a gold-trained scorer and records the absolute
// difference to its derived label. Order is preserved.
std::vector<ValidatedExample> validate(
    std::span<const AugmentedExample> examples, ScorerBackend& scorer,
    ValidateOptions options = {});

// Same conventions as describe(); throws InvalidInput when empty.
Summary difference_stats(std::span<const ValidatedExample> validated);

// Examples with difference <= beta, order preserved. Accepts beta = 0.
std::vector<ValidatedExample> select_by_difference(
    std::span<const ValidatedExample> validated, double beta);

// Gold items first, then the selected examples as labeled texts carrying
// their derived labels. Languages gained through selection leave the
// unseen set. Throws InvalidInput on an id collision.
Corpus assemble_training_set(const Corpus& gold,
                             std::span<const ValidatedExample> selected);

// Delimited file: id, text, language, derived_label, predicted_label,
// difference, source_id, path (joined by ">").
std::string format_validated(std::span<const ValidatedExample> validated);
std::vector<ValidatedExample> parse_validated(std::string_view content);

}  // namespace wader
