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

#include <string>

#include "wader/retry.hpp"
#include "wader/scorer.hpp"
#include "wader/translator.hpp"

namespace wader {

struct HttpEndpoint {
  std::string scheme_host_port;  // "http://host:port"
  std::string base_path;         // "" or "/prefix"

  // Accepts "http://host[:port][/prefix]".
  static HttpEndpoint parse(const std::string& url);
};

// POST {base}/translate with {"items":[{id,text,source,target}...]},
// expecting 200 {"items":[{id,text}...]}. 400 is fatal; 429 and 5xx (and
// connection failures) are retried per the policy.
class HttpTranslationBackend : public TranslationBackend {
 public:
  explicit HttpTranslationBackend(const std::string& url,
                                  RetryPolicy policy = {},
                                  Sleeper sleeper = real_sleeper());
  std::vector<std::string> translate(
      std::span<const TranslationRequest> batch) override;
  bool concurrent() const override { return true; }

 private:
  HttpEndpoint endpoint_;
  RetryPolicy policy_;
  Sleeper sleeper_;
};

// POST {base}/score with {"items":[{id,text,language}...]}, expecting
// 200 {"scores":[{id,score}...]}. 400 is fatal; 503 (model loading), 429
// and other 5xx are retried per the policy.
class HttpScorerBackend : public ScorerBackend {
 public:
  explicit HttpScorerBackend(const std::string& url, RetryPolicy policy = {},
                             Sleeper sleeper = real_sleeper());
  std::vector<double> score(std::span<const ScoreItem> items) override;

 private:
  HttpEndpoint endpoint_;
  RetryPolicy policy_;
  Sleeper sleeper_;
};

}  // namespace wader
