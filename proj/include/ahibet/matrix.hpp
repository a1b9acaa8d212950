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

#ifndef AHIBET_MATRIX_HPP_
#define AHIBET_MATRIX_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ahibet/modq.hpp"

namespace ahibet {

using IntVector = std::vector<i64>;

// Vector over Z_q, entries canonical in [0, q).
class ModVector {
 public:
  ModVector() = default;
  ModVector(std::size_t size, u64 q);
  ModVector(std::vector<u64> values, u64 q);

  std::size_t size() const { return values_.size(); }
  u64 q() const { return q_; }
  u64 operator[](std::size_t i) const { return values_[i]; }
  void set(std::size_t i, u64 v);
  std::span<const u64> values() const { return values_; }

  bool operator==(const ModVector&) const = default;

 private:
  u64 q_ = 2;
  std::vector<u64> values_;
};

// Dense row-major matrix over Z_q.
class ModMatrix {
 public:
  ModMatrix() = default;
  ModMatrix(std::size_t rows, std::size_t cols, u64 q);
  // Throws Errc::kModulus if an entry is outside [0, q).
  ModMatrix(std::size_t rows, std::size_t cols, u64 q, std::vector<u64> data);

  static ModMatrix identity(std::size_t n, u64 q);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  u64 q() const { return q_; }
  std::span<const u64> data() const { return data_; }

  u64 at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, u64 v);
  std::span<const u64> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  ModVector column(std::size_t j) const;
  ModMatrix columns(std::size_t first, std::size_t count) const;
  ModMatrix transpose() const;

  bool operator==(const ModMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  u64 q_ = 2;
  std::vector<u64> data_;
};

// Dense row-major signed-integer matrix.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  IntMatrix(std::size_t rows, std::size_t cols, std::vector<i64> data);

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_columns(const std::vector<IntVector>& cols,
                                std::size_t rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const i64> data() const { return data_; }

  i64 at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, i64 v) { data_[i * cols_ + j] = v; }

  IntVector column(std::size_t j) const;
  void set_column(std::size_t j, const IntVector& v);
  IntMatrix transpose() const;
  i64 max_abs() const;

  bool operator==(const IntMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<i64> data_;
};

struct GramSchmidtData {
  std::size_t dim = 0;    // ambient dimension (rows of the basis)
  std::size_t count = 0;  // number of vectors
  std::vector<double> ortho;  // column j at [j * dim, (j + 1) * dim)
  std::vector<double> norms;
  double max_norm = 0.0;

  const double* column(std::size_t j) const { return ortho.data() + j * dim; }
};

// --- Overflow-checked integer helpers (throw Errc::kOverflow). ---
i64 checked_add(i64 a, i64 b);
i64 checked_mul(i64 a, i64 b);

// --- Modular products. ---
ModMatrix mat_mul_mod(const ModMatrix& a, const ModMatrix& b);
ModMatrix mixed_mul_mod(const ModMatrix& a, const IntMatrix& r);
ModMatrix add_mod(const ModMatrix& a, const ModMatrix& b);
ModMatrix hconcat(const ModMatrix& a, const ModMatrix& b);
ModMatrix reduce_mod(const IntMatrix& r, u64 q);
IntMatrix center_lift(const ModMatrix& a);

// s^T * a
ModVector vec_mat_mod(const ModVector& s, const ModMatrix& a);
// a * x with a signed x
ModVector mat_vec_mod(const ModMatrix& a, std::span<const i64> x);

// --- Exact integer products. ---
IntMatrix int_mul(const IntMatrix& a, const IntMatrix& b);
IntMatrix hconcat(const IntMatrix& a, const IntMatrix& b);
IntMatrix vconcat(const IntMatrix& a, const IntMatrix& b);
IntMatrix negate(const IntMatrix& a);

// --- Solvers. ---

// Returns s with s^T a == b^T (mod q). q must be prime.
ModVector solve_left(const ModMatrix& a, const ModVector& b);

// Returns x with x^T t == y^T over the integers, t square.
IntVector solve_int(const IntMatrix& t, std::span<const i64> y);

// Inverse over Z_q for any modulus q >= 2 (Euclidean row reduction).
ModMatrix inverse_mod(const ModMatrix& a);

// Rank over Z_q, q prime.
std::size_t rank_mod(const ModMatrix& a);

// Particular solutions of f x == u (mod q). Pivots are chosen among units of
// Z_q, so prime and prime-power moduli are supported whenever f is
// surjective; throws Errc::kRankDeficient otherwise.
class RightSolver {
 public:
  explicit RightSolver(const ModMatrix& f);

  // Solution supported on the pivot columns, entries in [0, q).
  IntVector solve(const ModVector& u) const;
  std::span<const std::size_t> pivots() const { return pivots_; }

 private:
  std::size_t n_ = 0;
  std::size_t width_ = 0;
  u64 q_ = 2;
  std::vector<std::size_t> pivots_;
  ModMatrix transform_;  // n x n, maps u to the pivot coordinates
};

// Determinant of a square integer matrix modulo a prime p.
u64 det_mod_prime(const IntMatrix& a, u64 p);

// --- Real-valued quantities. ---

// Gram-Schmidt of the columns of b, processed left to right.
// Throws Errc::kRankDeficient if a column is dependent on its predecessors
// (squared residual below 1e-18 of its squared length).
GramSchmidtData gram_schmidt(const IntMatrix& b);

// Upper estimate of the largest singular value: 100 power iterations on
// r^T r, inflated by 1%.
double s1_upper(const IntMatrix& r);

// Column-major double copy of b.
std::vector<double> to_column_major(const IntMatrix& b);

}  // namespace ahibet

#endif  // AHIBET_MATRIX_HPP_
