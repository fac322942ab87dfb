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


// Serial reference kernels against their OpenMP versions, plus one full
// reference-regressor fit.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "wader/corpus.hpp"
#include "wader/kernels.hpp"
#include "wader/scorer.hpp"

namespace {

using wader::kernels::CsrMatrix;

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = unit(rng);
  return v;
}

// Rows with `per_row` random columns, like hashed n-gram features.
CsrMatrix random_matrix(std::size_t rows, std::size_t cols, std::size_t per_row) {
  std::mt19937_64 rng(3);
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::uint32_t> picked(per_row);
    for (auto& c : picked) c = static_cast<std::uint32_t>(rng() % cols);
    std::sort(picked.begin(), picked.end());
    picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
    for (auto c : picked) {
      m.col.push_back(c);
      m.val.push_back(0.1);
    }
    m.row_ptr.push_back(m.col.size());
  }
  return m;
}

template <bool Parallel>
void BM_Dot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vector(n, 1), b = random_vector(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? wader::kernels::parallel::dot(a, b)
                                      : wader::kernels::serial::dot(a, b));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

template <bool Parallel>
void BM_PearsonSums(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vector(n, 1), b = random_vector(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        Parallel ? wader::kernels::parallel::pearson_sums(a, b)
                 : wader::kernels::serial::pearson_sums(a, b));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

template <bool Parallel>
void BM_Spmv(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const CsrMatrix m = random_matrix(rows, 1u << 18, 120);
  const auto x = random_vector(m.cols, 4);
  std::vector<double> y(rows);
  for (auto _ : state) {
    if (Parallel) {
      wader::kernels::parallel::spmv(m, x, y);
    } else {
      wader::kernels::serial::spmv(m, x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(m.nnz()));
}

void BM_TrainReference(benchmark::State& state) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> letter('a', 'z');
  std::uniform_int_distribution<int> tenth(10, 50);
  std::vector<wader::LabeledText> items;
  for (int i = 0; i < state.range(0); ++i) {
    std::string text;
    for (int c = 0; c < 60; ++c) text.push_back(c % 7 == 6 ? ' ' : static_cast<char>(letter(rng)));
    items.push_back({"i" + std::to_string(i), text, "en", tenth(rng) / 10.0});
  }
  const wader::Corpus corpus(std::move(items));
  for (auto _ : state) {
    benchmark::DoNotOptimize(wader::train_reference(corpus));
  }
}

}  // namespace

BENCHMARK(BM_Dot<false>)->Name("dot/serial")->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK(BM_Dot<true>)->Name("dot/parallel")->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK(BM_PearsonSums<false>)->Name("pearson_sums/serial")->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK(BM_PearsonSums<true>)->Name("pearson_sums/parallel")->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK(BM_Spmv<false>)->Name("spmv/serial")->Arg(2000)->Arg(20000);
BENCHMARK(BM_Spmv<true>)->Name("spmv/parallel")->Arg(2000)->Arg(20000);
BENCHMARK(BM_TrainReference)->Name("train_reference")->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
