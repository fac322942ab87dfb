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

#include <cmath>
#include <map>
#include <set>
#include <numbers>
#include <random>

#include "doctest.h"
#include "synthetic.hpp"
#include "wader/error.hpp"
#include "wader/validator.hpp"

using namespace wader;

namespace {

AugmentedExample example(const std::string& id, double label,
                         const std::string& text = "",
                         const std::string& language = "hi") {
  return {id, text.empty() ? "text " + id : text, language, label, "src",
          {"en", language}};
}

ValidatedExample with_difference(const std::string& id, double difference) {
  return {example(id, 3.0), 3.0 + difference, difference};
}

class ConstantScorer : public ScorerBackend {
 public:
  explicit ConstantScorer(double value) : value_(value) {}
  std::vector<double> score(std::span<const ScoreItem> items) override {
    return std::vector<double>(items.size(), value_);
  }

 private:
  double value_;
};

// Returns each item's derived label, looked up by id.
class OracleScorer : public ScorerBackend {
 public:
  explicit OracleScorer(const std::vector<AugmentedExample>& examples) {
    for (const auto& e : examples) labels_[e.id] = e.derived_label;
  }
  std::vector<double> score(std::span<const ScoreItem> items) override {
    std::vector<double> out;
    for (const auto& item : items) out.push_back(labels_.at(item.id));
    return out;
  }

 private:
  std::map<std::string, double> labels_;
};

// Fails on the n-th call, then works.
class FlakyScorer : public ScorerBackend {
 public:
  explicit FlakyScorer(int fail_on) : fail_on_(fail_on) {}
  int calls = 0;
  std::vector<double> score(std::span<const ScoreItem> items) override {
    if (++calls == fail_on_) {
      throw BackendError(BackendFailure::kUnreachable, "gone");
    }
    return std::vector<double>(items.size(), 2.0);
  }

 private:
  int fail_on_;
};

std::vector<ValidatedExample> random_validated(std::mt19937_64& rng,
                                               std::size_t n) {
  std::uniform_real_distribution<double> label(1.0, 5.0);
  std::vector<ValidatedExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double derived = label(rng);
    const double predicted = label(rng);
    out.push_back({example("v" + std::to_string(i), derived), predicted,
                   std::abs(predicted - derived)});
  }
  return out;
}

}  // namespace

TEST_CASE("perfect oracle gives zero differences") {
  std::vector<AugmentedExample> examples;
  for (int i = 0; i < 50; ++i) {
    examples.push_back(example("e" + std::to_string(i), 1.0 + 0.08 * i));
  }
  OracleScorer scorer(examples);
  const auto validated = validate(examples, scorer);
  REQUIRE(validated.size() == examples.size());
  for (std::size_t i = 0; i < validated.size(); ++i) {
    CHECK(validated[i].example == examples[i]);
    CHECK(validated[i].difference == 0.0);
  }
  CHECK(select_by_difference(validated, 1e-9).size() == validated.size());
}

TEST_CASE("constant scorer differences are exact") {
  const std::vector<AugmentedExample> examples = {example("a", 1.0),
                                                  example("b", 5.0)};
  ConstantScorer scorer(3.0);
  const auto validated = validate(examples, scorer);
  CHECK(validated[0].difference == 2.0);
  CHECK(validated[1].difference == 2.0);
  CHECK(validated[0].predicted_label == 3.0);
}

TEST_CASE("difference statistics") {
  const std::vector<ValidatedExample> zeros = {
      with_difference("a", 0), with_difference("b", 0), with_difference("c", 0)};
  const Summary z = difference_stats(zeros);
  CHECK(z.mean == 0.0);
  CHECK(z.std_dev == 0.0);
  const std::vector<ValidatedExample> two = {with_difference("a", 0.1),
                                             with_difference("b", 0.3)};
  CHECK(difference_stats(two).mean == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(difference_stats({}), InvalidInput);
}

TEST_CASE("half-normal differences have mean sigma*sqrt(2/pi)") {
  constexpr double kSigma = 0.5;
  constexpr std::size_t kDraws = 10000;
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal(0.0, kSigma);
  std::vector<ValidatedExample> validated;
  for (std::size_t i = 0; i < kDraws; ++i) {
    validated.push_back(
        with_difference("h" + std::to_string(i), std::abs(normal(rng))));
  }
  const double expected = kSigma * std::sqrt(2.0 / std::numbers::pi);
  CHECK(std::abs(expected - 0.3989) < 5e-5);
  const double sd = kSigma * std::sqrt(1.0 - 2.0 / std::numbers::pi);
  const double standard_error = sd / std::sqrt(static_cast<double>(kDraws));
  CHECK(std::abs(difference_stats(validated).mean - expected) <=
        3.0 * standard_error);
}

TEST_CASE("selection boundary is inclusive and order preserving") {
  const std::vector<ValidatedExample> v = {
      with_difference("a", 0.05), with_difference("b", 0.15),
      with_difference("c", 0.25), with_difference("d", 0.35)};
  const auto kept = select_by_difference(v, 0.2);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].example.id == "a");
  CHECK(kept[1].example.id == "b");
  const std::vector<ValidatedExample> exact = {with_difference("x", 0.0),
                                               with_difference("y", 0.01)};
  const auto zero = select_by_difference(exact, 0.0);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].example.id == "x");
  CHECK(select_by_difference(v, 0.35).size() == 4);
  CHECK(select_by_difference(v, 0.01).empty());
  CHECK_THROWS_AS(select_by_difference(v, -0.1), InvalidInput);
  CHECK_THROWS_AS(ValidationConfig{std::nan("")}.validate(), InvalidInput);
}

TEST_CASE("selection nests as beta grows") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> beta(0.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto v = random_validated(rng, 1 + rng() % 80);
    double b1 = beta(rng), b2 = beta(rng);
    if (b1 > b2) std::swap(b1, b2);
    const auto small = select_by_difference(v, b1);
    const auto large = select_by_difference(v, b2);
    std::set<std::string> large_ids;
    for (const auto& e : large) large_ids.insert(e.example.id);
    for (const auto& e : small) CHECK(large_ids.count(e.example.id) == 1);
    CHECK(small.size() <= large.size());
  }
}

TEST_CASE("deduplication keeps first occurrence per text and language") {
  std::vector<AugmentedExample> examples = {
      example("a", 2.0, "same", "hi"), example("b", 3.0, "same", "hi"),
      example("c", 4.0, "same", "ko"), example("d", 4.0, "other", "hi")};
  const DedupResult result = deduplicate(examples);
  CHECK(result.removed == 1);
  REQUIRE(result.kept.size() == 3);
  CHECK(result.kept[0].id == "a");
  CHECK(result.kept[1].id == "c");
}

TEST_CASE("scorer failure yields a resumable partial result") {
  std::vector<AugmentedExample> examples;
  for (int i = 0; i < 10; ++i) examples.push_back(example("e" + std::to_string(i), 3.0));
  FlakyScorer flaky(3);
  std::vector<ValidatedExample> partial;
  try {
    validate(examples, flaky, {3, 0, {}});
    FAIL("expected abort");
  } catch (const ValidationAborted& e) {
    CHECK(e.cursor() == 6);
    CHECK(e.code() == ExitCode::kBackend);
    partial = e.partial();
  }
  const auto resumed_from = partial.size();
  FlakyScorer healthy(-1);
  const auto full = validate(examples, healthy, {3, resumed_from, partial});
  REQUIRE(full.size() == 10);
  CHECK(healthy.calls == 2);
  for (std::size_t i = 0; i < full.size(); ++i) {
    CHECK(full[i].example.id == examples[i].id);
  }
  CHECK_THROWS_AS(validate(examples, healthy, {3, 4, partial}), InvalidInput);
}

TEST_CASE("assembly puts gold first and labels selected by derived label") {
  const Corpus gold = testing::token_corpus(5, {"en", "fr"}, 2, {"hi", "ko"});
  std::vector<ValidatedExample> selected;
  for (int i = 0; i < 5; ++i) {
    selected.push_back({example("s" + std::to_string(i), 4.5), 4.0, 0.5});
  }
  const Corpus out = assemble_training_set(gold, selected);
  REQUIRE(out.size() == 15);
  for (std::size_t i = 0; i < 10; ++i) CHECK(out.items()[i] == gold.items()[i]);
  CHECK(out.items()[10].label == 4.5);
  CHECK(out.items()[10].language == "hi");
  CHECK(out.seen_languages() == LanguageSet{"en", "fr", "hi"});
  CHECK(out.unseen_languages() == LanguageSet{"ko"});

  CHECK(assemble_training_set(gold, {}).items() == gold.items());

  std::vector<ValidatedExample> colliding = {
      {example(gold.items()[0].id, 3.0), 3.0, 0.0}};
  CHECK_THROWS_AS(assemble_training_set(gold, colliding), InvalidInput);
}

TEST_CASE("validated file round-trip is exact") {
  std::mt19937_64 rng(5);
  const auto v = random_validated(rng, 40);
  CHECK(parse_validated(format_validated(v)) == v);
  CHECK(parse_validated(format_validated({})).empty());
  CHECK_THROWS_AS(parse_validated("id,text\n"), InvalidInput);
}
