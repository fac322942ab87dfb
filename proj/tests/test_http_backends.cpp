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
#include <chrono>
#include <mutex>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "wader/error.hpp"
#include "wader/http_backends.hpp"
#include "wader/scorer.hpp"
#include "wader/translator.hpp"

using namespace wader;
using nlohmann::json;
using std::chrono::milliseconds;

namespace {

// In-process server on an ephemeral port, stopped on destruction.
class TestServer {
 public:
  httplib::Server server;

  void start() {
    port_ = server.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~TestServer() {
    server.stop();
    if (thread_.joinable()) thread_.join();
  }
  std::string url(const std::string& prefix = "") const {
    return "http://127.0.0.1:" + std::to_string(port_) + prefix;
  }

 private:
  int port_ = 0;
  std::thread thread_;
};

struct RecordingSleeper {
  std::shared_ptr<std::vector<milliseconds>> delays =
      std::make_shared<std::vector<milliseconds>>();
  Sleeper sleeper() {
    auto d = delays;
    return [d](milliseconds ms) { d->push_back(ms); };
  }
};

// Reverses text; answers items in reverse order to exercise id matching.
void reverse_translate(const httplib::Request& req, httplib::Response& res) {
  const json body = json::parse(req.body);
  json items = json::array();
  for (auto it = body["items"].rbegin(); it != body["items"].rend(); ++it) {
    std::string text = (*it)["text"].get<std::string>();
    std::reverse(text.begin(), text.end());
    items.push_back({{"id", (*it)["id"]}, {"text", text}});
  }
  res.set_content(json{{"items", items}}.dump(), "application/json");
}

}  // namespace

TEST_CASE("retry delays follow the backoff policy") {
  RetryPolicy policy;
  CHECK(policy.delay(0) == milliseconds(500));
  CHECK(policy.delay(1) == milliseconds(1000));
  CHECK(policy.delay(3) == milliseconds(4000));
  CHECK(policy.max_attempts == 5);
}

TEST_CASE("endpoint parsing") {
  const auto e = HttpEndpoint::parse("http://localhost:8080/api/v1/");
  CHECK(e.scheme_host_port == "http://localhost:8080");
  CHECK(e.base_path == "/api/v1");
  CHECK(HttpEndpoint::parse("http://h:1").base_path.empty());
  CHECK_THROWS_AS(HttpEndpoint::parse("https://h:1"), InvalidInput);
  CHECK_THROWS_AS(HttpEndpoint::parse("h:1"), InvalidInput);
  CHECK_THROWS_AS(HttpEndpoint::parse("http://"), InvalidInput);
}

TEST_CASE("translate wire protocol") {
  TestServer ts;
  json seen_body;
  std::mutex mutex;
  ts.server.Post("/svc/translate", [&](const httplib::Request& req,
                                       httplib::Response& res) {
    {
      std::lock_guard<std::mutex> lock(mutex);
      seen_body = json::parse(req.body);
    }
    reverse_translate(req, res);
  });
  ts.start();
  HttpTranslationBackend backend(ts.url("/svc"));
  const std::vector<TranslationRequest> batch = {
      {"a|en>hi", "abc", "en", "hi"}, {"b|en>fr", "xyz", "en", "fr"}};
  CHECK(backend.translate(batch) == std::vector<std::string>{"cba", "zyx"});
  const json expected = {
      {"items",
       {{{"id", "a|en>hi"}, {"text", "abc"}, {"source", "en"}, {"target", "hi"}},
        {{"id", "b|en>fr"}, {"text", "xyz"}, {"source", "en"}, {"target", "fr"}}}}};
  CHECK(seen_body == expected);
  CHECK(backend.concurrent());
}

TEST_CASE("transient statuses are retried with backoff") {
  for (int status : {429, 500, 503}) {
    TestServer ts;
    std::atomic<int> calls{0};
    ts.server.Post("/translate", [&](const httplib::Request& req,
                                     httplib::Response& res) {
      if (++calls < 3) {
        res.status = status;
        return;
      }
      reverse_translate(req, res);
    });
    ts.start();
    RecordingSleeper rec;
    HttpTranslationBackend backend(ts.url(), {}, rec.sleeper());
    const std::vector<TranslationRequest> batch = {{"i", "ab", "en", "fr"}};
    CHECK(backend.translate(batch) == std::vector<std::string>{"ba"});
    CHECK(calls == 3);
    CHECK(*rec.delays == std::vector<milliseconds>{milliseconds(500),
                                                   milliseconds(1000)});
  }
}

TEST_CASE("persistent 5xx exhausts after five attempts") {
  TestServer ts;
  std::atomic<int> calls{0};
  ts.server.Post("/translate", [&](const httplib::Request&,
                                   httplib::Response& res) {
    ++calls;
    res.status = 502;
  });
  ts.start();
  RecordingSleeper rec;
  HttpTranslationBackend backend(ts.url(), {}, rec.sleeper());
  const std::vector<TranslationRequest> batch = {{"i", "ab", "en", "fr"}};
  try {
    backend.translate(batch);
    FAIL("expected failure");
  } catch (const BackendError& e) {
    CHECK(e.failure() == BackendFailure::kExhausted);
  }
  CHECK(calls == 5);
  CHECK(*rec.delays ==
        std::vector<milliseconds>{milliseconds(500), milliseconds(1000),
                                  milliseconds(2000), milliseconds(4000)});
}

TEST_CASE("400 is fatal and never retried") {
  TestServer ts;
  std::atomic<int> calls{0};
  ts.server.Post("/translate", [&](const httplib::Request&,
                                   httplib::Response& res) {
    ++calls;
    res.status = 400;
    res.set_content("bad batch", "text/plain");
  });
  ts.start();
  RecordingSleeper rec;
  HttpTranslationBackend backend(ts.url(), {}, rec.sleeper());
  const std::vector<TranslationRequest> batch = {{"i", "ab", "en", "fr"}};
  try {
    backend.translate(batch);
    FAIL("expected failure");
  } catch (const BackendError& e) {
    CHECK(e.failure() == BackendFailure::kRejected);
  }
  CHECK(calls == 1);
  CHECK(rec.delays->empty());
}

TEST_CASE("unreachable server reports connection failure") {
  RecordingSleeper rec;
  // Nothing listens on the TCP port-multiplexer port.
  HttpScorerBackend backend("http://127.0.0.1:1", {}, rec.sleeper());
  const std::vector<ScoreItem> items = {{"a", "t", "en"}};
  try {
    backend.score(items);
    FAIL("expected failure");
  } catch (const BackendError& e) {
    CHECK(e.failure() == BackendFailure::kUnreachable);
  }
  CHECK(rec.delays->size() == 4);
}

TEST_CASE("malformed responses are rejected") {
  TestServer ts;
  ts.server.Post("/translate", [](const httplib::Request&,
                                  httplib::Response& res) {
    res.set_content("not json", "application/json");
  });
  ts.server.Post("/score", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"scores":[{"id":"other","score":2}]})",
                    "application/json");
  });
  ts.start();
  HttpTranslationBackend translator(ts.url());
  const std::vector<TranslationRequest> batch = {{"i", "ab", "en", "fr"}};
  CHECK_THROWS_AS(translator.translate(batch), BackendError);
  HttpScorerBackend scorer(ts.url());
  const std::vector<ScoreItem> items = {{"a", "t", "en"}};
  CHECK_THROWS_AS(scorer.score(items), BackendError);
}

TEST_CASE("score wire protocol, batching and clamping") {
  TestServer ts;
  std::atomic<int> calls{0};
  json first_body;
  ts.server.Post("/score", [&](const httplib::Request& req,
                               httplib::Response& res) {
    const json body = json::parse(req.body);
    if (calls++ == 0) first_body = body;
    json scores = json::array();
    for (const auto& item : body["items"]) {
      // Out-of-range raw score for one id to check the clamp.
      const std::string id = item["id"];
      const double score = id == "i0" ? 7.5 : 0.5 + item["text"].get<std::string>().size();
      scores.push_back({{"id", id}, {"score", score}});
    }
    res.set_content(json{{"scores", scores}}.dump(), "application/json");
  });
  ts.start();
  HttpScorerBackend scorer(ts.url());
  CHECK(scorer.score({}).empty());
  CHECK(calls == 0);

  std::vector<ScoreItem> items;
  for (int i = 0; i < 70; ++i) {
    items.push_back({"i" + std::to_string(i), std::string(i % 4, 'x'), "en"});
  }
  const auto predictions = predict(scorer, items);
  CHECK(calls == 3);  // 32 + 32 + 6
  REQUIRE(predictions.size() == 70);
  CHECK(predictions[0].score == 5.0);
  CHECK(predictions[4].score == 1.0);   // 0.5 clamped up
  CHECK(predictions[5].score == 1.5);
  CHECK(predictions[7].score == 3.5);
  CHECK(first_body["items"].size() == 32);
  CHECK(first_body["items"][1] ==
        json{{"id", "i1"}, {"text", "x"}, {"language", "en"}});
}

TEST_CASE("503 while the model loads is retried") {
  TestServer ts;
  std::atomic<int> calls{0};
  ts.server.Post("/score", [&](const httplib::Request& req,
                               httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 503;
      return;
    }
    json scores = json::array();
    const json body = json::parse(req.body);
    for (const auto& item : body["items"]) {
      scores.push_back({{"id", item["id"]}, {"score", 2.5}});
    }
    res.set_content(json{{"scores", scores}}.dump(), "application/json");
  });
  ts.start();
  RecordingSleeper rec;
  HttpScorerBackend scorer(ts.url(), {}, rec.sleeper());
  const std::vector<ScoreItem> items = {{"a", "t", "en"}};
  CHECK(scorer.score(items) == std::vector<double>{2.5});
  CHECK(rec.delays->size() == 1);
}

TEST_CASE("plan execution over HTTP with concurrent batches") {
  TestServer ts;
  std::atomic<int> in_flight{0};
  std::atomic<int> peak{0};
  ts.server.new_task_queue = [] { return new httplib::ThreadPool(8); };
  ts.server.Post("/translate", [&](const httplib::Request& req,
                                   httplib::Response& res) {
    const int now = ++in_flight;
    int expected = peak.load();
    while (now > expected && !peak.compare_exchange_weak(expected, now)) {
    }
    std::this_thread::sleep_for(milliseconds(5));
    reverse_translate(req, res);
    --in_flight;
  });
  ts.start();
  std::vector<LabeledText> items;
  for (int i = 0; i < 40; ++i) {
    items.push_back({"c" + std::to_string(i), "text" + std::to_string(i),
                     i % 2 ? "en" : "fr", 4.0});
  }
  const auto plan = build_plan(Corpus(items), {"hi"});
  HttpTranslationBackend backend(ts.url());
  const auto report = execute_plan(plan, backend, {4, 4});
  CHECK(peak.load() <= 4);
  REQUIRE(report.examples.size() == plan.output_count());
  IdentityBackend identity;
  const auto reference = execute_plan(plan, identity);
  for (std::size_t i = 0; i < report.examples.size(); ++i) {
    CHECK(report.examples[i].id == reference.examples[i].id);
    // Back translations reverse twice.
    if (report.examples[i].path.size() == 3) {
      CHECK(report.examples[i].text == reference.examples[i].text);
    }
  }
}
