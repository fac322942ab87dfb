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

#include "wader/http_backends.hpp"

#include <cmath>
#include <map>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "wader/error.hpp"

namespace wader {
namespace {

using nlohmann::json;

// Posts `body`, retrying transient failures, and returns the 200 body.
std::string post_with_retry(const HttpEndpoint& endpoint,
                            const std::string& route, const std::string& body,
                            const RetryPolicy& policy, const Sleeper& sleeper) {
  const std::string path = endpoint.base_path + route;
  BackendFailure failure = BackendFailure::kUnreachable;
  std::string last_error = "no attempt made";
  const int attempts = std::max(1, policy.max_attempts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    httplib::Client client(endpoint.scheme_host_port);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(120, 0);
    auto response = client.Post(path, body, "application/json");
    if (!response) {
      failure = BackendFailure::kUnreachable;
      last_error = "connection error: " + httplib::to_string(response.error());
    } else if (response->status == 200) {
      return response->body;
    } else if (response->status == 400) {
      throw BackendError(BackendFailure::kRejected,
                         "POST " + path + " rejected the batch (400): " +
                             response->body);
    } else if (response->status == 429 || response->status >= 500) {
      failure = BackendFailure::kExhausted;
      last_error = "HTTP " + std::to_string(response->status);
    } else {
      throw BackendError(BackendFailure::kRejected,
                         "POST " + path + " returned unexpected HTTP " +
                             std::to_string(response->status));
    }
    if (attempt + 1 < attempts) sleeper(policy.delay(attempt));
  }
  throw BackendError(failure, "POST " + endpoint.scheme_host_port + path +
                                  " failed after " + std::to_string(attempts) +
                                  " attempts: " + last_error);
}

json parse_response(const std::string& body, const std::string& what) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw BackendError(BackendFailure::kRejected,
                       what + ": malformed JSON response: " + e.what());
  }
}

}  // namespace

std::chrono::milliseconds RetryPolicy::delay(int attempt) const {
  const double ms =
      static_cast<double>(base.count()) * std::pow(factor, attempt);
  return std::chrono::milliseconds(static_cast<long long>(std::llround(ms)));
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

HttpEndpoint HttpEndpoint::parse(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") {
    throw InvalidInput("backend url must start with http://, got '" + url +
                       "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  HttpEndpoint endpoint;
  endpoint.scheme_host_port = url.substr(0, path_start);
  if (endpoint.scheme_host_port.size() <= scheme_end + 3) {
    throw InvalidInput("backend url has no host: '" + url + "'");
  }
  if (path_start != std::string::npos) {
    endpoint.base_path = url.substr(path_start);
    while (!endpoint.base_path.empty() && endpoint.base_path.back() == '/') {
      endpoint.base_path.pop_back();
    }
  }
  return endpoint;
}

HttpTranslationBackend::HttpTranslationBackend(const std::string& url,
                                               RetryPolicy policy,
                                               Sleeper sleeper)
    : endpoint_(HttpEndpoint::parse(url)),
      policy_(policy),
      sleeper_(std::move(sleeper)) {}

std::vector<std::string> HttpTranslationBackend::translate(
    std::span<const TranslationRequest> batch) {
  json items = json::array();
  for (const auto& request : batch) {
    items.push_back({{"id", request.id},
                     {"text", request.text},
                     {"source", request.source},
                     {"target", request.target}});
  }
  const json body = {{"items", items}};
  const json response = parse_response(
      post_with_retry(endpoint_, "/translate", body.dump(), policy_, sleeper_),
      "translate");
  std::map<std::string, std::string> texts;
  try {
    for (const auto& item : response.at("items")) {
      texts[item.at("id").get<std::string>()] = item.at("text").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw BackendError(BackendFailure::kRejected,
                       std::string("translate: bad response shape: ") + e.what());
  }
  std::vector<std::string> out;
  out.reserve(batch.size());
  for (const auto& request : batch) {
    const auto it = texts.find(request.id);
    if (it == texts.end()) {
      throw BackendError(BackendFailure::kRejected,
                         "translate: response lacks id '" + request.id + "'");
    }
    out.push_back(it->second);
  }
  return out;
}

HttpScorerBackend::HttpScorerBackend(const std::string& url,
                                     RetryPolicy policy, Sleeper sleeper)
    : endpoint_(HttpEndpoint::parse(url)),
      policy_(policy),
      sleeper_(std::move(sleeper)) {}

std::vector<double> HttpScorerBackend::score(std::span<const ScoreItem> items) {
  if (items.empty()) return {};
  json payload = json::array();
  for (const auto& item : items) {
    payload.push_back(
        {{"id", item.id}, {"text", item.text}, {"language", item.language}});
  }
  const json body = {{"items", payload}};
  const json response = parse_response(
      post_with_retry(endpoint_, "/score", body.dump(), policy_, sleeper_),
      "score");
  std::map<std::string, double> scores;
  try {
    for (const auto& entry : response.at("scores")) {
      scores[entry.at("id").get<std::string>()] = entry.at("score").get<double>();
    }
  } catch (const json::exception& e) {
    throw BackendError(BackendFailure::kRejected,
                       std::string("score: bad response shape: ") + e.what());
  }
  std::vector<double> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    const auto it = scores.find(item.id);
    if (it == scores.end()) {
      throw BackendError(BackendFailure::kRejected,
                         "score: response lacks id '" + item.id + "'");
    }
    out.push_back(it->second);
  }
  return out;
}

}  // namespace wader
