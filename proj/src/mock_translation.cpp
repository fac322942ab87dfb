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

#include <cctype>
#include <cmath>

#include "wader/delimited.hpp"
#include "wader/error.hpp"
#include "wader/hashing.hpp"
#include "wader/translator.hpp"

namespace wader {

std::vector<std::string> IdentityBackend::translate(
    std::span<const TranslationRequest> batch) {
  std::vector<std::string> texts;
  texts.reserve(batch.size());
  std::lock_guard<std::mutex> lock(mutex_);
  for (const auto& request : batch) {
    log_.push_back(request);
    texts.push_back(request.text);
  }
  return texts;
}

std::vector<TranslationRequest> IdentityBackend::requests() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return log_;
}

NoisyBackend::NoisyBackend(double drop_probability, std::uint64_t seed)
    : drop_probability_(drop_probability), seed_(seed) {
  if (!std::isfinite(drop_probability) || drop_probability < 0.0 ||
      drop_probability > 1.0) {
    throw InvalidInput("noise q " + format_exact(drop_probability) +
                       " outside [0, 1]");
  }
}

std::vector<std::string> NoisyBackend::translate(
    std::span<const TranslationRequest> batch) {
  std::vector<std::string> texts;
  texts.reserve(batch.size());
  for (const auto& request : batch) {
    std::uint64_t state =
        mix64(seed_ ^ fnv1a64(request.target, fnv1a64(request.id)));
    std::string out;
    std::size_t i = 0;
    const std::string& text = request.text;
    while (i < text.size()) {
      while (i < text.size() &&
             std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
      }
      const std::size_t start = i;
      while (i < text.size() &&
             !std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
      }
      if (start == i) break;
      state = mix64(state);
      // q = 1 must drop everything, so compare strictly below.
      if (unit_interval(state) < drop_probability_) continue;
      if (!out.empty()) out.push_back(' ');
      out.append(text, start, i - start);
    }
    texts.push_back(std::move(out));
  }
  return texts;
}

}  // namespace wader
