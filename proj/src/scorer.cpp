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

#include "wader/scorer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <utility>

#include "wader/delimited.hpp"
#include "wader/error.hpp"
#include "wader/hashing.hpp"

namespace wader {
namespace {

using kernels::CsrMatrix;
using Index = std::ptrdiff_t;

constexpr char kMagic[4] = {'W', 'A', 'D', 'R'};
constexpr std::uint32_t kModelVersion = 1;

// Byte offsets of UTF-8 code point starts, plus the end offset. Bytes that
// do not start a valid sequence count as one code point each.
std::vector<std::size_t> code_point_offsets(std::string_view text) {
  std::vector<std::size_t> offsets;
  offsets.reserve(text.size() + 1);
  std::size_t i = 0;
  while (i < text.size()) {
    offsets.push_back(i);
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t length = 1;
    if (lead >= 0xF0 && lead < 0xF8) {
      length = 4;
    } else if (lead >= 0xE0) {
      length = lead < 0xF0 ? 3 : 1;
    } else if (lead >= 0xC0) {
      length = 2;
    }
    if (i + length > text.size()) length = 1;
    for (std::size_t k = 1; k < length; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        length = 1;
        break;
      }
    }
    i += length;
  }
  offsets.push_back(text.size());
  return offsets;
}

void check_hash_dim(std::uint32_t hash_dim) {
  if (hash_dim == 0 || !std::has_single_bit(hash_dim)) {
    throw InvalidInput("hash dimension must be a power of two");
  }
}

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::string_view blob, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(blob[offset + i]))
             << (8 * i);
  }
  return value;
}

// Normal-equation operator for z = [w; b] over the active buckets.
class RidgeSystem {
 public:
  RidgeSystem(const CsrMatrix& x, double l2)
      : x_(x), xt_(kernels::transpose(x)), l2_(l2),
        n_(static_cast<double>(x.rows)), u_(x.rows) {}

  std::size_t dim() const { return x_.cols + 1; }

  // out = A z
  void apply(std::span<const double> z, std::span<double> out) {
    const std::size_t m = x_.cols;
    kernels::parallel::spmv(x_, z.first(m), u_);
    const double b = z[m];
    for (double& v : u_) v += b;
    kernels::parallel::spmv(xt_, u_, out.first(m));
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < static_cast<Index>(m); ++j) {
      out[j] = out[j] / n_ + l2_ * z[j];
    }
    out[m] = kernels::parallel::sum(u_) / n_;
  }

  void rhs(std::span<const double> y, std::span<double> out) const {
    const std::size_t m = x_.cols;
    kernels::parallel::spmv(xt_, y, out.first(m));
    for (std::size_t j = 0; j < m; ++j) out[j] /= n_;
    out[m] = kernels::parallel::sum(y) / n_;
  }

 private:
  const CsrMatrix& x_;
  CsrMatrix xt_;
  double l2_;
  double n_;
  std::vector<double> u_;
};

}  // namespace

double clamp(double score) {
  if (!std::isfinite(score)) {
    throw InvalidInput("clamp: non-finite score " + format_exact(score));
  }
  return std::min(kMaxLabel, std::max(kMinLabel, score));
}

std::vector<ScoreItem> to_score_items(const Corpus& corpus) {
  std::vector<ScoreItem> items;
  items.reserve(corpus.size());
  for (const auto& item : corpus.items()) {
    items.push_back({item.id, item.text, item.language});
  }
  return items;
}

std::vector<Prediction> predict(ScorerBackend& backend,
                                std::span<const ScoreItem> items,
                                std::size_t batch_size) {
  if (batch_size == 0) throw InvalidInput("batch size must be >= 1");
  std::vector<Prediction> predictions;
  predictions.reserve(items.size());
  for (std::size_t begin = 0; begin < items.size(); begin += batch_size) {
    const auto batch =
        items.subspan(begin, std::min(batch_size, items.size() - begin));
    auto batch_ids = [&] {
      std::string ids;
      for (const auto& item : batch) {
        if (!ids.empty()) ids += ", ";
        ids += item.id;
      }
      return ids;
    };
    std::vector<double> scores;
    try {
      scores = backend.score(batch);
    } catch (const BackendError& e) {
      throw BackendError(e.failure(), std::string(e.what()) +
                                          " [failed batch ids: " +
                                          batch_ids() + "]");
    }
    if (scores.size() != batch.size()) {
      throw BackendError(BackendFailure::kRejected,
                         "scorer returned " + std::to_string(scores.size()) +
                             " scores for " + std::to_string(batch.size()) +
                             " items [failed batch ids: " + batch_ids() + "]");
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!std::isfinite(scores[i])) {
        throw BackendError(BackendFailure::kRejected,
                           "scorer returned a non-finite score for '" +
                               batch[i].id + "'");
      }
      predictions.push_back({batch[i].id, clamp(scores[i])});
    }
  }
  return predictions;
}

HashedFeatures featurize(std::string_view text, std::uint32_t hash_dim) {
  check_hash_dim(hash_dim);
  const auto offsets = code_point_offsets(text);
  const std::size_t length = offsets.size() - 1;
  std::vector<std::pair<std::uint32_t, double>> hits;
  for (std::size_t n = kMinNgram; n <= kMaxNgram; ++n) {
    for (std::size_t i = 0; i + n <= length; ++i) {
      const std::string_view gram =
          text.substr(offsets[i], offsets[i + n] - offsets[i]);
      const std::uint64_t h = mix64(fnv1a64(gram));
      const auto bucket = static_cast<std::uint32_t>(h & (hash_dim - 1));
      hits.emplace_back(bucket, (h >> 63) != 0 ? -1.0 : 1.0);
    }
  }
  std::sort(hits.begin(), hits.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  HashedFeatures features;
  for (std::size_t i = 0; i < hits.size();) {
    const std::uint32_t bucket = hits[i].first;
    double total = 0.0;
    for (; i < hits.size() && hits[i].first == bucket; ++i) {
      total += hits[i].second;
    }
    if (total != 0.0) {
      features.index.push_back(bucket);
      features.value.push_back(total);
    }
  }
  double norm = 0.0;
  for (double v : features.value) norm += v * v;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& v : features.value) v /= norm;
  }
  return features;
}

kernels::CsrMatrix featurize_all(std::span<const std::string> texts,
                                 std::uint32_t hash_dim) {
  check_hash_dim(hash_dim);
  std::vector<HashedFeatures> rows(texts.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < static_cast<Index>(texts.size()); ++i) {
    rows[i] = featurize(texts[i], hash_dim);
  }
  CsrMatrix m;
  m.rows = texts.size();
  m.cols = hash_dim;
  m.row_ptr.assign(1, 0);
  for (const auto& row : rows) {
    m.col.insert(m.col.end(), row.index.begin(), row.index.end());
    m.val.insert(m.val.end(), row.value.begin(), row.value.end());
    m.row_ptr.push_back(m.val.size());
  }
  return m;
}

double NgramRegressor::raw_score(std::string_view text) const {
  const HashedFeatures features = featurize(text, hash_dim);
  double s = bias;
  for (std::size_t k = 0; k < features.index.size(); ++k) {
    s += weights[features.index[k]] * features.value[k];
  }
  return s;
}

std::vector<double> NgramRegressor::raw_scores(
    std::span<const std::string> texts) const {
  std::vector<double> scores(texts.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < static_cast<Index>(texts.size()); ++i) {
    scores[i] = raw_score(texts[i]);
  }
  return scores;
}

NgramRegressor train_reference(const Corpus& corpus,
                               const TrainOptions& options,
                               TrainReport* report) {
  if (corpus.size() < 2) {
    throw InvalidInput("train_reference: need at least 2 items, got " +
                       std::to_string(corpus.size()));
  }
  if (!(options.l2 > 0.0) || !std::isfinite(options.l2)) {
    throw InvalidInput("train_reference: l2 must be positive");
  }
  if (!(options.tolerance > 0.0)) {
    throw InvalidInput("train_reference: tolerance must be positive");
  }

  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& item : corpus.items()) texts.push_back(item.text);
  const std::vector<double> labels = corpus.labels();
  CsrMatrix x = featurize_all(texts, kHashDim);

  // Restrict to active buckets; inactive weights solve l2 * w = 0.
  std::vector<std::uint32_t> compact(kHashDim, 0);
  std::vector<std::uint32_t> active;
  {
    std::vector<bool> used(kHashDim, false);
    for (auto c : x.col) used[c] = true;
    for (std::uint32_t b = 0; b < kHashDim; ++b) {
      if (used[b]) {
        compact[b] = static_cast<std::uint32_t>(active.size());
        active.push_back(b);
      }
    }
  }
  for (auto& c : x.col) c = compact[c];
  x.cols = active.size();

  RidgeSystem system(x, options.l2);
  const std::size_t dim = system.dim();
  const std::size_t max_iterations = options.max_iterations != 0
                                         ? options.max_iterations
                                         : 2 * dim + 100;

  std::vector<double> rhs(dim), z(dim, 0.0), r(dim), p(dim), ap(dim);
  system.rhs(labels, rhs);
  z[dim - 1] = kernels::parallel::sum(labels) / static_cast<double>(labels.size());
  system.apply(z, ap);
  for (std::size_t i = 0; i < dim; ++i) r[i] = rhs[i] - ap[i];
  p = r;
  const double rhs_norm = std::sqrt(kernels::parallel::dot(rhs, rhs));
  double rs = kernels::parallel::dot(r, r);
  std::size_t iterations = 0;
  while (std::sqrt(rs) > options.tolerance * rhs_norm) {
    if (iterations == max_iterations) {
      throw InvalidInput("train_reference: conjugate gradient did not reach "
                         "the tolerance in " +
                         std::to_string(max_iterations) + " iterations");
    }
    system.apply(p, ap);
    const double alpha = rs / kernels::parallel::dot(p, ap);
    kernels::parallel::axpy(alpha, p, z);
    kernels::parallel::axpy(-alpha, ap, r);
    const double rs_next = kernels::parallel::dot(r, r);
    const double beta = rs_next / rs;
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < static_cast<Index>(dim); ++i) {
      p[i] = r[i] + beta * p[i];
    }
    rs = rs_next;
    ++iterations;
  }

  NgramRegressor model;
  for (std::size_t j = 0; j < active.size(); ++j) model.weights[active[j]] = z[j];
  model.bias = z[dim - 1];
  if (report != nullptr) {
    report->iterations = iterations;
    report->relative_residual = std::sqrt(rs) / rhs_norm;
    report->active_features = active.size();
  }
  return model;
}

std::string serialize_model(const NgramRegressor& model) {
  if (model.weights.size() != model.hash_dim) {
    throw InvalidInput("model weights do not match hash dimension");
  }
  std::string blob(kMagic, sizeof(kMagic));
  blob.reserve(20 + 8 * static_cast<std::size_t>(model.hash_dim));
  put_le<std::uint32_t>(blob, kModelVersion);
  put_le<std::uint32_t>(blob, model.hash_dim);
  put_le<std::uint64_t>(blob, std::bit_cast<std::uint64_t>(model.bias));
  for (double w : model.weights) {
    put_le<std::uint64_t>(blob, std::bit_cast<std::uint64_t>(w));
  }
  return blob;
}

NgramRegressor deserialize_model(std::string_view blob) {
  if (blob.size() < 20 || blob.substr(0, 4) != std::string_view(kMagic, 4)) {
    throw InvalidInput("model: bad magic");
  }
  const auto version = get_le<std::uint32_t>(blob, 4);
  if (version != kModelVersion) {
    throw InvalidInput("model: unsupported version " + std::to_string(version));
  }
  NgramRegressor model;
  model.hash_dim = get_le<std::uint32_t>(blob, 8);
  check_hash_dim(model.hash_dim);
  if (blob.size() != 20 + 8 * static_cast<std::size_t>(model.hash_dim)) {
    throw InvalidInput("model: truncated or oversized blob");
  }
  model.bias = std::bit_cast<double>(get_le<std::uint64_t>(blob, 12));
  model.weights.resize(model.hash_dim);
  for (std::size_t i = 0; i < model.hash_dim; ++i) {
    model.weights[i] =
        std::bit_cast<double>(get_le<std::uint64_t>(blob, 20 + 8 * i));
  }
  return model;
}

void save_model(const NgramRegressor& model, const std::string& path) {
  write_file(path, serialize_model(model));
}

NgramRegressor load_model(const std::string& path) {
  try {
    return deserialize_model(read_file(path));
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

std::vector<double> ReferenceScorer::score(std::span<const ScoreItem> items) {
  std::vector<std::string> texts;
  texts.reserve(items.size());
  for (const auto& item : items) texts.push_back(item.text);
  return model_.raw_scores(texts);
}

}  // namespace wader
