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

#include "wader/kernels.hpp"

#include <cassert>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wader::kernels {
namespace {

using Index = std::ptrdiff_t;

std::size_t chunk_count(std::size_t n) {
  return (n + kReductionChunk - 1) / kReductionChunk;
}

// Sums f(i) over [0, n) chunk by chunk; partials are combined in order.
template <typename F>
double chunked_sum(std::size_t n, F f) {
  const std::size_t chunks = chunk_count(n);
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < static_cast<Index>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t end = std::min(n, begin + kReductionChunk);
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += f(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

CsrMatrix transpose(const CsrMatrix& m) {
  CsrMatrix t;
  t.rows = m.cols;
  t.cols = m.rows;
  t.row_ptr.assign(m.cols + 1, 0);
  for (auto c : m.col) ++t.row_ptr[c + 1];
  for (std::size_t i = 0; i < m.cols; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
  t.col.resize(m.nnz());
  t.val.resize(m.nnz());
  std::vector<std::size_t> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      const std::size_t slot = cursor[m.col[k]]++;
      t.col[slot] = static_cast<std::uint32_t>(r);
      t.val[slot] = m.val[k];
    }
  }
  return t;
}

namespace serial {

void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> y) {
  assert(x.size() == m.cols && y.size() == m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) {
    double s = 0.0;
    for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      s += m.val[k] * x[m.col[k]];
    }
    y[r] = s;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

PearsonSums pearson_sums(std::span<const double> x,
                         std::span<const double> y) {
  assert(x.size() == y.size());
  PearsonSums s;
  const double n = static_cast<double>(x.size());
  s.mean_x = sum(x) / n;
  s.mean_y = sum(y) / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - s.mean_x;
    const double dy = y[i] - s.mean_y;
    s.sxy += dx * dy;
    s.sxx += dx * dx;
    s.syy += dy * dy;
  }
  return s;
}

}  // namespace serial

namespace parallel {

void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> y) {
  assert(x.size() == m.cols && y.size() == m.rows);
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(m.rows); ++r) {
    double s = 0.0;
    for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      s += m.val[k] * x[m.col[k]];
    }
    y[r] = s;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return chunked_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double sum(std::span<const double> a) {
  return chunked_sum(a.size(), [&](std::size_t i) { return a[i]; });
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < static_cast<Index>(x.size()); ++i) {
    y[i] += alpha * x[i];
  }
}

PearsonSums pearson_sums(std::span<const double> x,
                         std::span<const double> y) {
  assert(x.size() == y.size());
  PearsonSums s;
  const double n = static_cast<double>(x.size());
  s.mean_x = sum(x) / n;
  s.mean_y = sum(y) / n;
  const std::size_t chunks = chunk_count(x.size());
  std::vector<double> pxy(chunks), pxx(chunks), pyy(chunks);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < static_cast<Index>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t end = std::min(x.size(), begin + kReductionChunk);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double dx = x[i] - s.mean_x;
      const double dy = y[i] - s.mean_y;
      sxy += dx * dy;
      sxx += dx * dx;
      syy += dy * dy;
    }
    pxy[c] = sxy;
    pxx[c] = sxx;
    pyy[c] = syy;
  }
  for (std::size_t c = 0; c < chunks; ++c) {
    s.sxy += pxy[c];
    s.sxx += pxx[c];
    s.syy += pyy[c];
  }
  return s;
}

}  // namespace parallel

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace wader::kernels
