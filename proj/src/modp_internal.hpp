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

#ifndef AHIBET_SRC_MODP_INTERNAL_HPP_
#define AHIBET_SRC_MODP_INTERNAL_HPP_

#include <optional>
#include <span>
#include <vector>

#include "ahibet/matrix.hpp"

namespace ahibet::detail {

// Row reduction over a prime p < 2^31 with Barrett reduction; used on the
// large matrices met while converting lattice generators into bases.
class ModPrimeMatrix {
 public:
  ModPrimeMatrix(const IntMatrix& a, u64 p);
  ModPrimeMatrix(std::size_t rows, std::size_t cols, u64 p);

  void set(std::size_t i, std::size_t j, i64 v) {
    data_[i * cols_ + j] = reduce_signed(v, p_);
  }

  // Destroys the contents.
  u64 determinant();

  // Nonzero y with A y == 0 (mod p), or nullopt if the columns are
  // independent. Destroys the contents.
  std::optional<std::vector<u64>> kernel_vector();

 private:
  u64 reduce(u64 x) const {
    const u64 qh = static_cast<u64>((static_cast<u128>(x) * mu_) >> 64);
    u64 r = x - qh * p_;
    while (r >= p_) r -= p_;
    return r;
  }
  // row r -= f * row c, from column `from` on.
  void eliminate(std::size_t r, std::size_t c, u64 f, std::size_t from);

  std::size_t rows_, cols_;
  u64 p_, mu_;
  std::vector<u64> data_;
};

// LU factorization of a square integer matrix modulo a prime p < 2^31.
class ModPrimeLu {
 public:
  ModPrimeLu(const IntMatrix& a, u64 p);

  bool invertible() const { return invertible_; }
  u64 p() const { return p_; }
  // out = a^{-1} rhs (mod p); rhs entries in [0, p).
  void solve(const std::vector<u64>& rhs, std::vector<u64>& out) const;

 private:
  std::size_t n_;
  u64 p_;
  bool invertible_ = true;
  std::vector<u64> lu_;  // unit-lower L below the diagonal, U on and above
  std::vector<u64> inv_diag_;
  std::vector<std::size_t> perm_;  // row i of P a is row perm_[i] of a
};

// Incremental linear-independence test modulo a prime p < 2^31. Vectors that
// are independent mod p are independent over the rationals.
class IndependenceTracker {
 public:
  explicit IndependenceTracker(std::size_t dim, u64 p = (u64{1} << 31) - 1);

  // Adds v if it is independent of the vectors kept so far.
  bool add(std::span<const i64> v);
  std::size_t rank() const { return pivots_.size(); }

 private:
  u64 reduce(u64 x) const {
    const u64 qh = static_cast<u64>((static_cast<u128>(x) * mu_) >> 64);
    u64 r = x - qh * p_;
    while (r >= p_) r -= p_;
    return r;
  }

  std::size_t dim_;
  u64 p_, mu_;
  std::vector<std::vector<u64>> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace ahibet::detail

#endif  // AHIBET_SRC_MODP_INTERNAL_HPP_
