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
#include <span>
#include <string>
#include <vector>

#include "wader/corpus.hpp"
#include "wader/kernels.hpp"

namespace wader {

// min(5, max(1, score)). Throws InvalidInput on NaN or infinity.
double clamp(double score);

struct Prediction {
  std::string id;
  double score = kMinLabel;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct ScoreItem {
  std::string id;
  std::string text;
  std::string language;
};

// Anything that maps texts to raw (unclamped) scores: the built-in reference
// regressor or a remote model behind the scorer wire protocol.
class ScorerBackend {
 public:
  virtual ~ScorerBackend() = default;
  // One raw score per item, in order. Throws BackendError.
  virtual std::vector<double> score(std::span<const ScoreItem> items) = 0;
};

// Scores in batches and clamps. A failing batch is rethrown as BackendError
// listing the ids it contained.
std::vector<Prediction> predict(ScorerBackend& backend,
                                std::span<const ScoreItem> items,
                                std::size_t batch_size = 32);

std::vector<ScoreItem> to_score_items(const Corpus& corpus);

inline constexpr std::uint32_t kHashDim = 1u << 18;
inline constexpr std::size_t kMinNgram = 2;
inline constexpr std::size_t kMaxNgram = 4;

// Sparse document vector: sorted unique hash buckets with signed,
// L2-normalized character n-gram counts (n = 2..4 over code points).
struct HashedFeatures {
  std::vector<std::uint32_t> index;
  std::vector<double> value;
};

HashedFeatures featurize(std::string_view text,
                         std::uint32_t hash_dim = kHashDim);

// Row-per-document matrix over the full hash space, built in parallel.
kernels::CsrMatrix featurize_all(std::span<const std::string> texts,
                                 std::uint32_t hash_dim = kHashDim);

struct NgramRegressor {
  std::uint32_t hash_dim = kHashDim;
  double bias = 0.0;
  std::vector<double> weights = std::vector<double>(kHashDim, 0.0);

  double raw_score(std::string_view text) const;
  // Unclamped scores, one per text, computed in parallel.
  std::vector<double> raw_scores(std::span<const std::string> texts) const;
};

struct TrainOptions {
  double l2 = 3e-4;
  // Accepted for interface stability; the solve draws no random numbers,
  // so output is a pure function of (corpus, l2, tolerance).
  std::uint64_t seed = 0;
  double tolerance = 1e-6;  // relative residual of the normal equations
  std::size_t max_iterations = 0;  // 0: 2 * (features + 1) + 100
};

struct TrainReport {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  std::size_t active_features = 0;
};

// Ridge regression of label on hashed features, minimizing
//   (1/n) sum_i (y_i - w.x_i - b)^2 + l2 |w|^2
// with an unregularized bias, by conjugate gradient on the normal equations
// restricted to buckets that occur in the corpus. Starts from w = 0,
// b = mean label. Throws InvalidInput for < 2 items or l2 <= 0.
NgramRegressor train_reference(const Corpus& corpus,
                               const TrainOptions& options = {},
                               TrainReport* report = nullptr);

// Little-endian: "WADR", u32 version, u32 hash_dim, f64 bias,
// f64 weights[hash_dim].
std::string serialize_model(const NgramRegressor& model);
NgramRegressor deserialize_model(std::string_view blob);
void save_model(const NgramRegressor& model, const std::string& path);
NgramRegressor load_model(const std::string& path);

class ReferenceScorer : public ScorerBackend {
 public:
  explicit ReferenceScorer(NgramRegressor model) : model_(std::move(model)) {}
  std::vector<double> score(std::span<const ScoreItem> items) override;
  const NgramRegressor& model() const { return model_; }

 private:
  NgramRegressor model_;
};

}  // namespace wader
