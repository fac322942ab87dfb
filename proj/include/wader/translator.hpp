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
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wader/corpus.hpp"
#include "wader/error.hpp"

namespace wader {

struct TranslationRequest {
  std::string id;
  std::string text;
  std::string source;
  std::string target;

  friend bool operator==(const TranslationRequest&,
                         const TranslationRequest&) = default;
};

// A translated copy of a gold item. The derived label is the gold label,
// carried over unchanged; `path` lists every language traversed.
struct AugmentedExample {
  std::string id;
  std::string text;
  std::string language;
  double derived_label = kMinLabel;
  std::string source_id;
  std::vector<std::string> path;

  friend bool operator==(const AugmentedExample&,
                         const AugmentedExample&) = default;
};

enum class Route : std::uint8_t {
  kCross,    // seen -> other seen language
  kForward,  // seen -> unseen language
};

struct PlannedRequest {
  TranslationRequest request;
  std::size_t candidate = 0;
  Route route = Route::kCross;
  // A cross request whose output is translated back to the source language.
  bool back_translate = false;
};

struct TranslationPlan {
  std::vector<std::string> seen;
  std::vector<std::string> unseen;
  std::vector<LabeledText> candidates;
  std::vector<PlannedRequest> requests;

  // Examples produced when every request succeeds.
  std::size_t output_count() const;
};

struct PlanOptions {
  // Back-translate through the lexicographically first pivot only.
  bool single_back = false;
  // Seen languages to translate into; defaults to the candidates' languages.
  std::optional<LanguageSet> seen;
};

// Candidate in seen language Li: one request per other seen language Lk
// (each followed by Lk -> Li back-translation) and one per unseen language.
// Order: candidates in corpus order, targets in lexicographic order.
TranslationPlan build_plan(const Corpus& candidates, const LanguageSet& unseen,
                           const PlanOptions& options = {});

// Ids of planned outputs.
std::string forward_id(const std::string& source_id, const std::string& from,
                       const std::string& to);
std::string back_id(const std::string& source_id, const std::string& from,
                    const std::string& pivot);

class TranslationBackend {
 public:
  virtual ~TranslationBackend() = default;
  // One output text per request, in request order. Throws BackendError.
  virtual std::vector<std::string> translate(
      std::span<const TranslationRequest> batch) = 0;
  // True when translate() may be called from several threads at once.
  virtual bool concurrent() const { return false; }
};

// Returns every text unchanged and keeps a log of what it was asked.
class IdentityBackend : public TranslationBackend {
 public:
  std::vector<std::string> translate(
      std::span<const TranslationRequest> batch) override;
  std::vector<TranslationRequest> requests() const;

 private:
  mutable std::mutex mutex_;
  std::vector<TranslationRequest> log_;
};

// Simulated degradation: each whitespace-separated token is dropped with
// probability q. The draw for a request depends only on (seed, id, target),
// so output does not depend on batching.
class NoisyBackend : public TranslationBackend {
 public:
  NoisyBackend(double drop_probability, std::uint64_t seed);
  std::vector<std::string> translate(
      std::span<const TranslationRequest> batch) override;
  bool concurrent() const override { return false; }

 private:
  double drop_probability_;
  std::uint64_t seed_;
};

struct ExecuteOptions {
  std::size_t batch_size = 32;
  std::size_t max_in_flight = 4;
};

struct TranslationFailure {
  std::string id;
  std::string source;
  std::string target;
  std::string reason;
};

struct ExecutionReport {
  std::size_t planned = 0;
  std::vector<AugmentedExample> examples;
  // Ids of outputs dropped for empty or whitespace-only text.
  std::vector<std::string> degenerate;
  std::vector<TranslationFailure> failures;
};

// Thrown when the backend rejects a batch or stays unreachable. Carries the
// work finished before the abort.
class TranslationAborted : public BackendError {
 public:
  TranslationAborted(const BackendError& cause, ExecutionReport partial);
  const ExecutionReport& partial() const { return partial_; }

 private:
  ExecutionReport partial_;
};

// Runs first hops, then back-translations of the successful cross outputs.
// Batches whose retries are exhausted are recorded as failures; a cross
// output that fails or degenerates takes its back-translation with it.
ExecutionReport execute_plan(const TranslationPlan& plan,
                             TranslationBackend& backend,
                             const ExecuteOptions& options = {});

std::string join_path(const std::vector<std::string>& path);
std::vector<std::string> split_path(std::string_view joined);

// Delimited file: id, text, language, derived_label, source_id, path.
std::string format_augmented(std::span<const AugmentedExample> examples);
std::vector<AugmentedExample> parse_augmented(std::string_view content);

}  // namespace wader
