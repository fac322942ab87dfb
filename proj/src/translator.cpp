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

#include "wader/translator.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <optional>
#include <thread>

#include "spdlog/spdlog.h"
#include "wader/delimited.hpp"
#include "wader/error.hpp"

namespace wader {
namespace {

bool is_degenerate(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

struct HopResults {
  // nullopt with an empty error: never attempted (run aborted first).
  std::vector<std::optional<std::string>> texts;
  std::vector<std::string> errors;
  std::optional<BackendError> fatal;

  explicit HopResults(std::size_t n) : texts(n), errors(n) {}
  bool ok(std::size_t i) const { return texts[i].has_value(); }
};

HopResults run_hop(const std::vector<TranslationRequest>& requests,
                   TranslationBackend& backend, const ExecuteOptions& options) {
  HopResults results(requests.size());
  const std::size_t batch_size = options.batch_size;
  const std::size_t batches = (requests.size() + batch_size - 1) / batch_size;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex fatal_mutex;
  std::size_t fatal_batch = batches;

  auto work = [&] {
    while (!stop.load()) {
      const std::size_t b = next.fetch_add(1);
      if (b >= batches) return;
      const std::size_t begin = b * batch_size;
      const std::size_t end = std::min(requests.size(), begin + batch_size);
      std::span<const TranslationRequest> batch(requests.data() + begin,
                                                end - begin);
      try {
        auto texts = backend.translate(batch);
        if (texts.size() != batch.size()) {
          throw BackendError(BackendFailure::kRejected,
                             "backend returned " +
                                 std::to_string(texts.size()) +
                                 " texts for a batch of " +
                                 std::to_string(batch.size()));
        }
        for (std::size_t i = 0; i < texts.size(); ++i) {
          results.texts[begin + i] = std::move(texts[i]);
        }
      } catch (const BackendError& e) {
        if (e.failure() == BackendFailure::kExhausted) {
          for (std::size_t i = begin; i < end; ++i) results.errors[i] = e.what();
          continue;
        }
        std::lock_guard<std::mutex> lock(fatal_mutex);
        if (b < fatal_batch) {
          fatal_batch = b;
          results.fatal = e;
        }
        stop.store(true);
      }
    }
  };

  const std::size_t workers =
      backend.concurrent() ? std::min(options.max_in_flight, batches) : 1;
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return results;
}

ExecutionReport assemble(const TranslationPlan& plan, const HopResults& first,
                         const HopResults* back,
                         const std::vector<std::size_t>& back_slot) {
  ExecutionReport report;
  report.planned = plan.output_count();
  for (std::size_t r = 0; r < plan.requests.size(); ++r) {
    const PlannedRequest& planned = plan.requests[r];
    const TranslationRequest& request = planned.request;
    const LabeledText& gold = plan.candidates[planned.candidate];
    const std::string back_request_id =
        back_id(gold.id, request.source, request.target);

    if (!first.ok(r)) {
      if (first.errors[r].empty()) continue;
      report.failures.push_back(
          {request.id, request.source, request.target, first.errors[r]});
      if (planned.back_translate) {
        report.failures.push_back({back_request_id, request.target,
                                   request.source,
                                   "cross translation failed"});
      }
      continue;
    }
    const std::string& text = *first.texts[r];
    if (is_degenerate(text)) {
      report.degenerate.push_back(request.id);
      if (planned.back_translate) report.degenerate.push_back(back_request_id);
      continue;
    }
    report.examples.push_back({request.id, text, request.target, gold.label,
                               gold.id, {request.source, request.target}});
    if (!planned.back_translate || back == nullptr) continue;

    const std::size_t slot = back_slot[r];
    if (!back->ok(slot)) {
      if (!back->errors[slot].empty()) {
        report.failures.push_back({back_request_id, request.target,
                                   request.source, back->errors[slot]});
      }
      continue;
    }
    const std::string& back_text = *back->texts[slot];
    if (is_degenerate(back_text)) {
      report.degenerate.push_back(back_request_id);
      continue;
    }
    report.examples.push_back(
        {back_request_id, back_text, request.source, gold.label, gold.id,
         {request.source, request.target, request.source}});
  }
  return report;
}

}  // namespace

std::size_t TranslationPlan::output_count() const {
  std::size_t count = 0;
  for (const auto& planned : requests) count += planned.back_translate ? 2 : 1;
  return count;
}

std::string forward_id(const std::string& source_id, const std::string& from,
                       const std::string& to) {
  return source_id + "|" + from + ">" + to;
}

std::string back_id(const std::string& source_id, const std::string& from,
                    const std::string& pivot) {
  return source_id + "|" + from + ">" + pivot + ">" + from;
}

TranslationPlan build_plan(const Corpus& candidates, const LanguageSet& unseen,
                           const PlanOptions& options) {
  LanguageSet seen = options.seen.value_or(LanguageSet{});
  seen.insert(candidates.seen_languages().begin(),
              candidates.seen_languages().end());
  for (const auto& language : unseen) {
    if (language.empty()) throw InvalidInput("empty unseen language code");
    if (seen.count(language) != 0) {
      throw InvalidInput("language '" + language +
                         "' is both a candidate language and unseen");
    }
  }

  TranslationPlan plan;
  plan.seen.assign(seen.begin(), seen.end());
  plan.unseen.assign(unseen.begin(), unseen.end());
  plan.candidates = candidates.items();

  LanguageSet all = seen;
  all.insert(unseen.begin(), unseen.end());
  for (std::size_t c = 0; c < plan.candidates.size(); ++c) {
    const LabeledText& item = plan.candidates[c];
    std::optional<std::string> first_pivot;
    for (const auto& target : all) {
      if (target == item.language) continue;
      PlannedRequest planned;
      planned.request = {forward_id(item.id, item.language, target), item.text,
                         item.language, target};
      planned.candidate = c;
      if (seen.count(target) != 0) {
        planned.route = Route::kCross;
        planned.back_translate = !options.single_back || !first_pivot;
        if (!first_pivot) first_pivot = target;
      } else {
        planned.route = Route::kForward;
      }
      plan.requests.push_back(std::move(planned));
    }
  }
  return plan;
}

TranslationAborted::TranslationAborted(const BackendError& cause,
                                       ExecutionReport partial)
    : BackendError(cause.failure(),
                   std::string(cause.what()) + " (aborted after " +
                       std::to_string(partial.examples.size()) + " of " +
                       std::to_string(partial.planned) +
                       " planned outputs)"),
      partial_(std::move(partial)) {}

ExecutionReport execute_plan(const TranslationPlan& plan,
                             TranslationBackend& backend,
                             const ExecuteOptions& options) {
  if (options.batch_size == 0) throw InvalidInput("batch size must be >= 1");
  if (options.max_in_flight == 0) {
    throw InvalidInput("max in-flight batches must be >= 1");
  }

  std::vector<TranslationRequest> first_requests;
  first_requests.reserve(plan.requests.size());
  for (const auto& planned : plan.requests) {
    first_requests.push_back(planned.request);
  }
  const HopResults first = run_hop(first_requests, backend, options);
  std::vector<std::size_t> back_slot(plan.requests.size(), 0);
  if (first.fatal) {
    throw TranslationAborted(*first.fatal,
                             assemble(plan, first, nullptr, back_slot));
  }

  std::vector<TranslationRequest> back_requests;
  for (std::size_t r = 0; r < plan.requests.size(); ++r) {
    const PlannedRequest& planned = plan.requests[r];
    if (!planned.back_translate || !first.ok(r) ||
        is_degenerate(*first.texts[r])) {
      continue;
    }
    back_slot[r] = back_requests.size();
    const std::string& source_id = plan.candidates[planned.candidate].id;
    back_requests.push_back(
        {back_id(source_id, planned.request.source, planned.request.target),
         *first.texts[r], planned.request.target, planned.request.source});
  }
  const HopResults back = run_hop(back_requests, backend, options);
  ExecutionReport report = assemble(plan, first, &back, back_slot);
  if (back.fatal) throw TranslationAborted(*back.fatal, std::move(report));

  if (!report.degenerate.empty()) {
    spdlog::warn("translation: {} degenerate outputs excluded",
                 report.degenerate.size());
  }
  if (!report.failures.empty()) {
    spdlog::warn("translation: {} outputs failed after retries",
                 report.failures.size());
  }
  return report;
}

std::string join_path(const std::vector<std::string>& path) {
  std::string joined;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) joined.push_back('>');
    joined += path[i];
  }
  return joined;
}

std::vector<std::string> split_path(std::string_view joined) {
  std::vector<std::string> path;
  std::size_t start = 0;
  while (true) {
    const auto end = joined.find('>', start);
    path.emplace_back(joined.substr(start, end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return path;
}

std::string format_augmented(std::span<const AugmentedExample> examples) {
  std::string out;
  write_row(out,
            {"id", "text", "language", "derived_label", "source_id", "path"},
            ',');
  for (const auto& e : examples) {
    write_row(out,
              {e.id, e.text, e.language, format_exact(e.derived_label),
               e.source_id, join_path(e.path)},
              ',');
  }
  return out;
}

std::vector<AugmentedExample> parse_augmented(std::string_view content) {
  const DelimitedTable table = parse_delimited(content);
  const Row expected = {"id",          "text",      "language",
                        "derived_label", "source_id", "path"};
  if (table.header != expected) {
    throw InvalidInput("augmented file: unexpected header");
  }
  std::vector<AugmentedExample> examples;
  examples.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const Row& row = table.rows[r];
    if (row.size() != expected.size()) {
      throw InvalidInput("augmented file: row " + std::to_string(r + 1) +
                         " has " + std::to_string(row.size()) + " fields");
    }
    examples.push_back({row[0], row[1], row[2],
                        parse_double(row[3], "derived_label"), row[4],
                        split_path(row[5])});
  }
  return examples;
}

}  // namespace wader
