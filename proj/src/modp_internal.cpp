/*
 * Copyright 2026 The AHIBET Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "modp_internal.hpp"

#include <algorithm>
#include <numeric>

#include "ahibet/errors.hpp"

namespace ahibet::detail {

ModPrimeMatrix::ModPrimeMatrix(std::size_t rows, std::size_t cols, u64 p)
    : rows_(rows), cols_(cols), p_(p), data_(rows * cols, 0) {
  if (p < 2 || p >= (u64{1} << 31)) {
    throw Error(Errc::kModulus, "small-prime elimination needs p < 2^31");
  }
  mu_ = static_cast<u64>((static_cast<u128>(1) << 64) / p);
}

ModPrimeMatrix::ModPrimeMatrix(const IntMatrix& a, u64 p)
    : ModPrimeMatrix(a.rows(), a.cols(), p) {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    data_[i] = reduce_signed(a.data()[i], p);
  }
}

void ModPrimeMatrix::eliminate(std::size_t r, std::size_t c, u64 f,
                               std::size_t from) {
  const u64 neg = p_ - f;
  u64* dst = data_.data() + r * cols_;
  const u64* src = data_.data() + c * cols_;
  for (std::size_t k = from; k < cols_; ++k) {
    dst[k] = reduce(dst[k] + neg * src[k]);
  }
}

u64 ModPrimeMatrix::determinant() {
  if (rows_ != cols_) throw Error(Errc::kDimension, "determinant of non-square");
  const std::size_t n = rows_;
  u64 det = 1 % p_;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && data_[piv * n + c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap_ranges(data_.begin() + piv * n, data_.begin() + (piv + 1) * n,
                       data_.begin() + c * n);
      det = neg_mod(det, p_);
    }
    const u64 pv = data_[c * n + c];
    det = reduce(det * pv);
    const u64 inv = inv_mod(pv, p_);
    for (std::size_t r = c + 1; r < n; ++r) {
      const u64 x = data_[r * n + c];
      if (x == 0) continue;
      eliminate(r, c, reduce(x * inv), c);
    }
  }
  return det;
}

std::optional<std::vector<u64>> ModPrimeMatrix::kernel_vector() {
  // Reduced row echelon form; the first free column yields a kernel vector.
  std::vector<std::size_t> pivot_cols;
  std::size_t rank = 0;
  std::optional<std::size_t> free_col;
  for (std::size_t c = 0; c < cols_; ++c) {
    std::size_t piv = rank;
    while (piv < rows_ && data_[piv * cols_ + c] == 0) ++piv;
    if (piv == rows_) {
      free_col = c;
      break;
    }
    if (piv != rank) {
      std::swap_ranges(data_.begin() + piv * cols_,
                       data_.begin() + (piv + 1) * cols_,
                       data_.begin() + rank * cols_);
    }
    const u64 inv = inv_mod(data_[rank * cols_ + c], p_);
    for (std::size_t k = c; k < cols_; ++k) {
      data_[rank * cols_ + k] = reduce(data_[rank * cols_ + k] * inv);
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == rank) continue;
      const u64 x = data_[r * cols_ + c];
      if (x != 0) eliminate(r, rank, x, c);
    }
    pivot_cols.push_back(c);
    ++rank;
  }
  if (!free_col) return std::nullopt;
  // Pivot columns are 0..free_col-1, with pivot row i for column i.
  std::vector<u64> y(cols_, 0);
  y[*free_col] = 1;
  for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
    y[pivot_cols[i]] = neg_mod(data_[i * cols_ + *free_col], p_);
  }
  return y;
}

ModPrimeLu::ModPrimeLu(const IntMatrix& a, u64 p)
    : n_(a.rows()), p_(p), perm_(a.rows()) {
  if (a.rows() != a.cols()) throw Error(Errc::kDimension, "LU of non-square");
  if (p < 2 || p >= (u64{1} << 31)) throw Error(Errc::kModulus, "LU needs p < 2^31");
  const std::size_t n = n_;
  lu_.resize(n * n);
  for (std::size_t i = 0; i < n * n; ++i) lu_[i] = reduce_signed(a.data()[i], p);
  const u64 mu = static_cast<u64>((static_cast<u128>(1) << 64) / p);
  auto reduce = [&](u64 x) {
    const u64 qh = static_cast<u64>((static_cast<u128>(x) * mu) >> 64);
    u64 r = x - qh * p;
    while (r >= p) r -= p;
    return r;
  };
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  inv_diag_.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && lu_[piv * n + c] == 0) ++piv;
    if (piv == n) {
      invertible_ = false;
      return;
    }
    if (piv != c) {
      std::swap_ranges(lu_.begin() + piv * n, lu_.begin() + (piv + 1) * n,
                       lu_.begin() + c * n);
      std::swap(perm_[piv], perm_[c]);
    }
    const u64 inv = inv_mod(lu_[c * n + c], p);
    inv_diag_[c] = inv;
    const u64* prow = &lu_[c * n];
    for (std::size_t r = c + 1; r < n; ++r) {
      u64* row = &lu_[r * n];
      const u64 f = reduce(row[c] * inv);
      row[c] = f;
      if (f == 0) continue;
      const u64 neg = p - f;
      for (std::size_t k = c + 1; k < n; ++k) row[k] = reduce(row[k] + neg * prow[k]);
    }
  }
}

void ModPrimeLu::solve(const std::vector<u64>& rhs, std::vector<u64>& out) const {
  const std::size_t n = n_;
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const u64* row = &lu_[i * n];
    u128 sub = 0;
    for (std::size_t k = 0; k < i; ++k) sub += static_cast<u128>(row[k]) * out[k];
    out[i] = sub_mod(rhs[perm_[i]], static_cast<u64>(sub % p_), p_);
  }
  for (std::size_t i = n; i-- > 0;) {
    const u64* row = &lu_[i * n];
    u128 sub = 0;
    for (std::size_t k = i + 1; k < n; ++k) sub += static_cast<u128>(row[k]) * out[k];
    const u64 s = static_cast<u64>(sub % p_);
    out[i] = static_cast<u64>(static_cast<u128>(sub_mod(out[i], s, p_)) * inv_diag_[i] % p_);
  }
}

IndependenceTracker::IndependenceTracker(std::size_t dim, u64 p)
    : dim_(dim), p_(p), mu_(static_cast<u64>((static_cast<u128>(1) << 64) / p)) {
  if (p < 2 || p >= (u64{1} << 31)) {
    throw Error(Errc::kModulus, "independence tracking needs p < 2^31");
  }
}

bool IndependenceTracker::add(std::span<const i64> v) {
  if (v.size() != dim_) throw Error(Errc::kDimension, "vector length differs");
  std::vector<u64> w(dim_);
  for (std::size_t i = 0; i < dim_; ++i) w[i] = reduce_signed(v[i], p_);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const u64 f = w[pivots_[r]];
    if (f == 0) continue;
    const u64 neg = p_ - f;
    const u64* row = rows_[r].data();
    for (std::size_t k = 0; k < dim_; ++k) w[k] = reduce(w[k] + neg * row[k]);
  }
  std::size_t piv = 0;
  while (piv < dim_ && w[piv] == 0) ++piv;
  if (piv == dim_) return false;
  const u64 inv = inv_mod(w[piv], p_);
  for (auto& x : w) x = reduce(x * inv);
  rows_.push_back(std::move(w));
  pivots_.push_back(piv);
  return true;
}

}  // namespace ahibet::detail
