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

#include <atomic>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "doctest.h"
#include "synthetic.hpp"
#include "wader/error.hpp"
#include "wader/translator.hpp"

using namespace wader;

namespace {

Corpus candidates_in(const std::vector<std::string>& languages,
                     std::size_t per_language) {
  std::vector<LabeledText> items;
  for (const auto& language : languages) {
    for (std::size_t i = 0; i < per_language; ++i) {
      items.push_back({language + std::to_string(i),
                       "text " + language + " " + std::to_string(i), language,
                       3.5});
    }
  }
  return Corpus(items);
}

// Uppercases text; concurrent, optionally failing for chosen request ids.
class ScriptedBackend : public TranslationBackend {
 public:
  std::set<std::string> exhausted_ids;
  std::set<std::string> fatal_ids;
  std::atomic<int> calls{0};

  std::vector<std::string> translate(
      std::span<const TranslationRequest> batch) override {
    ++calls;
    std::vector<std::string> out;
    for (const auto& r : batch) {
      if (fatal_ids.count(r.id)) {
        throw BackendError(BackendFailure::kUnreachable, "down");
      }
      if (exhausted_ids.count(r.id)) {
        throw BackendError(BackendFailure::kExhausted, "busy");
      }
      out.push_back(r.text + "/" + r.target);
    }
    std::this_thread::yield();
    return out;
  }
  bool concurrent() const override { return true; }
};

}  // namespace

TEST_CASE("smallest scheme instance") {
  const Corpus c({{"x", "hello", "en", 4.0}});
  const TranslationPlan plan = build_plan(c, {"hi"}, {false, LanguageSet{"en", "fr"}});
  REQUIRE(plan.requests.size() == 2);
  CHECK(plan.requests[0].request ==
        TranslationRequest{"x|en>fr", "hello", "en", "fr"});
  CHECK(plan.requests[0].route == Route::kCross);
  CHECK(plan.requests[0].back_translate);
  CHECK(plan.requests[1].request ==
        TranslationRequest{"x|en>hi", "hello", "en", "hi"});
  CHECK(plan.requests[1].route == Route::kForward);
  CHECK(plan.output_count() == 3);

  IdentityBackend backend;
  const ExecutionReport report = execute_plan(plan, backend);
  REQUIRE(report.examples.size() == 3);
  CHECK(report.examples[0].id == "x|en>fr");
  CHECK(report.examples[0].language == "fr");
  CHECK(report.examples[1].id == "x|en>fr>en");
  CHECK(report.examples[1].language == "en");
  CHECK(report.examples[1].path == std::vector<std::string>{"en", "fr", "en"});
  CHECK(report.examples[2].id == "x|en>hi");
  for (const auto& e : report.examples) {
    CHECK(e.derived_label == 4.0);
    CHECK(e.source_id == "x");
    CHECK(e.text == "hello");
  }
  const auto requests = backend.requests();
  REQUIRE(requests.size() == 3);
  CHECK(requests[2] == TranslationRequest{"x|en>fr>en", "hello", "fr", "en"});
}

TEST_CASE("six seen and four unseen: 14 per candidate, 10 with single-back") {
  const Corpus c = candidates_in(testing::seen_six(), 2);
  const LanguageSet unseen = {"ar", "hi", "ko", "nl"};
  const auto plan = build_plan(c, unseen);
  CHECK(plan.output_count() == c.size() * 14);
  IdentityBackend identity;
  CHECK(execute_plan(plan, identity).examples.size() == c.size() * 14);

  const auto single = build_plan(c, unseen, {true, std::nullopt});
  CHECK(single.output_count() == c.size() * 10);
  IdentityBackend identity2;
  const auto report = execute_plan(single, identity2);
  CHECK(report.examples.size() == c.size() * 10);
  // The single back-translation uses the lexicographically first pivot.
  std::size_t backs = 0;
  for (const auto& e : report.examples) {
    if (e.path.size() == 3) {
      ++backs;
      const std::string expected = e.path[0] == "en" ? "es" : "en";
      CHECK(e.path[1] == expected);
    }
  }
  CHECK(backs == c.size());
}

TEST_CASE("seen override keeps targets with no candidates") {
  const Corpus c({{"a", "t", "en", 4.0}});
  CHECK(build_plan(c, {}).requests.empty());
  const auto plan = build_plan(c, {}, {false, LanguageSet{"en", "fr", "zh"}});
  CHECK(plan.output_count() == 4);
  CHECK_THROWS_AS(build_plan(c, {"en"}), InvalidInput);
  CHECK_THROWS_AS(build_plan(c, {"fr"}, {false, LanguageSet{"fr"}}),
                  InvalidInput);
}

TEST_CASE("count identity by enumeration over a grid") {
  const std::vector<std::string> pool = {"l0", "l1", "l2", "l3", "l4", "l5",
                                         "u0", "u1", "u2", "u3"};
  for (std::size_t s = 1; s <= 6; ++s) {
    for (std::size_t u = 0; u <= 4; ++u) {
      LanguageSet seen(pool.begin(), pool.begin() + s);
      LanguageSet unseen(pool.begin() + 6, pool.begin() + 6 + u);
      for (std::size_t n : {1, 7}) {
        std::vector<LabeledText> items;
        for (std::size_t i = 0; i < n; ++i) {
          const std::string lang = pool[i % s];
          items.push_back({"c" + std::to_string(i), "t", lang, 4.0});
        }
        const Corpus c(items);
        for (bool single : {false, true}) {
          IdentityBackend backend;
          const auto plan = build_plan(c, unseen, {single, seen});
          const auto report = execute_plan(plan, backend);
          std::size_t per = single ? (s >= 2 ? s + u : u) : 2 * (s - 1) + u;
          CHECK(report.examples.size() == n * per);
          CHECK(plan.output_count() == n * per);
        }
      }
    }
  }
}

TEST_CASE("noisy backend with q = 1 makes everything degenerate") {
  const Corpus c = candidates_in({"en", "fr"}, 3);
  const auto plan = build_plan(c, {"hi"});
  NoisyBackend backend(1.0, 7);
  const auto report = execute_plan(plan, backend);
  CHECK(report.examples.empty());
  CHECK(report.degenerate.size() == plan.output_count());
  CHECK(report.failures.empty());
}

TEST_CASE("noisy backend is deterministic and accounts for every output") {
  const Corpus c = testing::token_corpus(17, {"en", "es", "fr", "it", "pt", "zh"},
                                         4);
  Corpus candidates(std::vector<LabeledText>(c.items().begin(),
                                             c.items().begin() + 100));
  const auto plan = build_plan(candidates, {"hi", "ko"});
  NoisyBackend first(0.3, 7);
  NoisyBackend second(0.3, 7);
  const auto a = execute_plan(plan, first);
  const auto b = execute_plan(plan, second);
  CHECK(a.examples.size() == plan.output_count() - a.degenerate.size());
  CHECK(format_augmented(a.examples) == format_augmented(b.examples));
  CHECK(a.degenerate == b.degenerate);

  NoisyBackend other(0.3, 8);
  CHECK(format_augmented(execute_plan(plan, other).examples) !=
        format_augmented(a.examples));
  CHECK_THROWS_AS(NoisyBackend(1.5, 1), InvalidInput);
  CHECK_THROWS_AS(NoisyBackend(-0.1, 1), InvalidInput);
}

TEST_CASE("noisy backend with q = 0 is the identity on tokens") {
  NoisyBackend backend(0.0, 3);
  const std::vector<TranslationRequest> batch = {
      {"a", "  one two\tthree ", "en", "fr"}};
  CHECK(backend.translate(batch) == std::vector<std::string>{"one two three"});
  CHECK_FALSE(backend.concurrent());
}

TEST_CASE("concurrent execution restores plan order") {
  const Corpus c = candidates_in(testing::seen_six(), 20);
  const auto plan = build_plan(c, {"hi", "nl"});
  ScriptedBackend serial_backend;
  const auto serial = execute_plan(plan, serial_backend, {5, 1});
  for (std::size_t in_flight : {2, 4, 8}) {
    ScriptedBackend backend;
    const auto report = execute_plan(plan, backend, {5, in_flight});
    CHECK(format_augmented(report.examples) ==
          format_augmented(serial.examples));
  }
  CHECK(serial.examples.size() == plan.output_count());
}

TEST_CASE("exhausted batches are recorded, not fatal") {
  const Corpus c({{"a", "t1", "en", 4.0}, {"b", "t2", "en", 4.0}});
  const auto plan = build_plan(c, {"hi"}, {false, LanguageSet{"en", "fr"}});
  ScriptedBackend backend;
  backend.exhausted_ids = {"a|en>fr"};
  const auto report = execute_plan(plan, backend, {1, 1});
  CHECK(report.examples.size() == 4);
  REQUIRE(report.failures.size() == 2);
  CHECK(report.failures[0].id == "a|en>fr");
  CHECK(report.failures[1].id == "a|en>fr>en");

  ScriptedBackend back_fail;
  back_fail.exhausted_ids = {"b|en>fr>en"};
  const auto second = execute_plan(plan, back_fail, {1, 1});
  CHECK(second.examples.size() == 5);
  REQUIRE(second.failures.size() == 1);
  CHECK(second.failures[0].source == "fr");
  CHECK(second.failures[0].target == "en");
}

TEST_CASE("unreachable backend aborts with partial results") {
  const Corpus c({{"a", "t1", "en", 4.0}, {"b", "t2", "en", 4.0}});
  const auto plan = build_plan(c, {"hi"}, {false, LanguageSet{"en", "fr"}});
  ScriptedBackend backend;
  backend.fatal_ids = {"b|en>fr"};
  try {
    execute_plan(plan, backend, {1, 1});
    FAIL("expected abort");
  } catch (const TranslationAborted& e) {
    CHECK(e.failure() == BackendFailure::kUnreachable);
    CHECK(e.code() == ExitCode::kBackend);
    // Only work before the failing batch is reported.
    REQUIRE(e.partial().examples.size() == 2);
    CHECK(e.partial().examples[0].id == "a|en>fr");
    CHECK(e.partial().examples[1].id == "a|en>hi");
  }
  CHECK_THROWS_AS(execute_plan(plan, backend, {0, 1}), InvalidInput);
}

TEST_CASE("augmented file round-trip") {
  const Corpus c = testing::token_corpus(5, {"en", "fr"}, 9);
  NoisyBackend backend(0.2, 1);
  const auto report = execute_plan(build_plan(c, {"hi"}), backend);
  CHECK(parse_augmented(format_augmented(report.examples)) == report.examples);
  CHECK(split_path(join_path({"en", "fr", "en"})) ==
        std::vector<std::string>{"en", "fr", "en"});
  CHECK_THROWS_AS(parse_augmented("a,b\n1,2\n"), InvalidInput);
}
