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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

// Numeric kernels behind the reference regressor and the evaluator. Each
// kernel has a plain serial reference and an OpenMP version. Parallel
// reductions sum fixed-size chunks and then combine the chunk partials in
// order, so results do not depend on the thread count.
namespace wader::kernels {

// Compressed sparse rows.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }
};

// Column indices stay sorted within each transposed row.
CsrMatrix transpose(const CsrMatrix& m);

struct PearsonSums {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double sxy = 0.0;  // sum of deviation products
  double sxx = 0.0;
  double syy = 0.0;
};

inline constexpr std::size_t kReductionChunk = 4096;

namespace serial {

// y = m x
void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// Two passes: means, then deviation sums.
PearsonSums pearson_sums(std::span<const double> x, std::span<const double> y);

}  // namespace serial

namespace parallel {

void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
PearsonSums pearson_sums(std::span<const double> x, std::span<const double> y);

}  // namespace parallel

int max_threads();

}  // namespace wader::kernels
