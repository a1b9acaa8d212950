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

#include "ahibet/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <utility>

#include "ahibet/errors.hpp"
#include "ahibet/kernels.hpp"
#include "modp_internal.hpp"

namespace ahibet {

namespace {

void require_same_q(u64 a, u64 b) {
  if (a != b) throw Error(Errc::kModulus, "operands use different moduli");
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(Errc::kDimension, what);
}

}  // namespace

// ---------------------------------------------------------------- ModVector

ModVector::ModVector(std::size_t size, u64 q) : q_(q), values_(size, 0) {
  if (q < 2) throw Error(Errc::kModulus, "q must be at least 2");
}

ModVector::ModVector(std::vector<u64> values, u64 q)
    : q_(q), values_(std::move(values)) {
  if (q < 2) throw Error(Errc::kModulus, "q must be at least 2");
  for (u64 v : values_) {
    if (v >= q) throw Error(Errc::kModulus, "entry outside [0, q)");
  }
}

void ModVector::set(std::size_t i, u64 v) {
  if (v >= q_) throw Error(Errc::kModulus, "entry outside [0, q)");
  values_.at(i) = v;
}

// ---------------------------------------------------------------- ModMatrix

ModMatrix::ModMatrix(std::size_t rows, std::size_t cols, u64 q)
    : rows_(rows), cols_(cols), q_(q), data_(rows * cols, 0) {
  if (q < 2) throw Error(Errc::kModulus, "q must be at least 2");
}

ModMatrix::ModMatrix(std::size_t rows, std::size_t cols, u64 q,
                     std::vector<u64> data)
    : rows_(rows), cols_(cols), q_(q), data_(std::move(data)) {
  if (q < 2) throw Error(Errc::kModulus, "q must be at least 2");
  require(data_.size() == rows * cols, "entry count does not match shape");
  for (u64 v : data_) {
    if (v >= q) throw Error(Errc::kModulus, "entry outside [0, q)");
  }
}

ModMatrix ModMatrix::identity(std::size_t n, u64 q) {
  ModMatrix m(n, n, q);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1 % q;
  return m;
}

void ModMatrix::set(std::size_t i, std::size_t j, u64 v) {
  if (v >= q_) throw Error(Errc::kModulus, "entry outside [0, q)");
  data_[i * cols_ + j] = v;
}

ModVector ModMatrix::column(std::size_t j) const {
  std::vector<u64> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = at(i, j);
  return ModVector(std::move(out), q_);
}

ModMatrix ModMatrix::columns(std::size_t first, std::size_t count) const {
  require(first + count <= cols_, "column range out of bounds");
  ModMatrix out(rows_, count, q_);
  for (std::size_t i = 0; i < rows_; ++i) {
    std::copy_n(data_.begin() + i * cols_ + first, count,
                out.data_.begin() + i * count);
  }
  return out;
}

ModMatrix ModMatrix::transpose() const {
  ModMatrix out(cols_, rows_, q_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out.data_[j * rows_ + i] = at(i, j);
  }
  return out;
}

// ---------------------------------------------------------------- IntMatrix

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols, std::vector<i64> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows * cols, "entry count does not match shape");
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1;
  return m;
}

IntMatrix IntMatrix::from_columns(const std::vector<IntVector>& cols,
                                  std::size_t rows) {
  IntMatrix m(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) m.set_column(j, cols[j]);
  return m;
}

IntVector IntMatrix::column(std::size_t j) const {
  IntVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = at(i, j);
  return out;
}

void IntMatrix::set_column(std::size_t j, const IntVector& v) {
  require(v.size() == rows_, "column length does not match rows");
  for (std::size_t i = 0; i < rows_; ++i) data_[i * cols_ + j] = v[i];
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out.data_[j * rows_ + i] = at(i, j);
  }
  return out;
}

i64 IntMatrix::max_abs() const {
  i64 m = 0;
  for (i64 v : data_) {
    if (v == INT64_MIN) throw Error(Errc::kOverflow, "entry is INT64_MIN");
    m = std::max(m, v < 0 ? -v : v);
  }
  return m;
}

// ------------------------------------------------------------ checked ints

i64 checked_add(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw Error(Errc::kOverflow, "integer addition overflows 64 bits");
  }
  return r;
}

i64 checked_mul(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw Error(Errc::kOverflow, "integer product overflows 64 bits");
  }
  return r;
}

namespace {

i64 narrow(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) {
    throw Error(Errc::kOverflow, "integer result overflows 64 bits");
  }
  return static_cast<i64>(v);
}

// Accumulates products in 128 bits; a 64-bit entry product is < 2^126, so
// flushing every 2 terms keeps the sum inside i128.
class CheckedAccumulator {
 public:
  void add(i64 a, i64 b) {
    i128 p = static_cast<i128>(a) * b;
    i128 r;
    if (__builtin_add_overflow(acc_, p, &r)) {
      throw Error(Errc::kOverflow, "integer accumulation overflows");
    }
    acc_ = r;
  }
  i64 result() const { return narrow(acc_); }

 private:
  i128 acc_ = 0;
};

}  // namespace

// ------------------------------------------------------- modular products

namespace {

unsigned bit_length(u64 v) { return v == 0 ? 0 : 64 - __builtin_clzll(v); }

// a (entries in [0, q)) times a signed matrix whose entries are bounded by
// max_abs in magnitude. Products are summed in 128 bits and reduced only as
// often as the magnitude bound requires.
template <typename Entry>
ModMatrix accumulate_product(const ModMatrix& a, std::size_t b_cols,
                             u64 max_abs, const Entry& entry) {
  const u64 q = a.q();
  const unsigned term_bits = bit_length(q - 1) + bit_length(max_abs);
  const std::size_t flush =
      term_bits >= 125 ? 1 : (term_bits <= 100 ? SIZE_MAX : std::size_t{1} << (125 - term_bits));
  std::vector<u64> out(a.rows() * b_cols, 0);
  std::vector<i128> acc(b_cols);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    std::size_t since = 0;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const i128 aik = a.at(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b_cols; ++j) acc[j] += aik * entry(k, j);
      if (++since == flush) {
        for (auto& v : acc) v %= static_cast<i128>(q);
        since = 0;
      }
    }
    for (std::size_t j = 0; j < b_cols; ++j) {
      i128 v = acc[j] % static_cast<i128>(q);
      if (v < 0) v += q;
      out[i * b_cols + j] = static_cast<u64>(v);
    }
  }
  return ModMatrix(a.rows(), b_cols, q, std::move(out));
}

}  // namespace

ModMatrix mat_mul_mod(const ModMatrix& a, const ModMatrix& b) {
  require(a.cols() == b.rows(), "mat_mul_mod: inner dimensions differ");
  require_same_q(a.q(), b.q());
  return accumulate_product(a, b.cols(), a.q() - 1,
                            [&](std::size_t k, std::size_t j) { return static_cast<i128>(b.at(k, j)); });
}

ModMatrix mixed_mul_mod(const ModMatrix& a, const IntMatrix& r) {
  require(a.cols() == r.rows(), "mixed_mul_mod: inner dimensions differ");
  u64 max_abs = 0;
  for (i64 v : r.data()) {
    const u64 mag = v < 0 ? static_cast<u64>(-(v + 1)) + 1 : static_cast<u64>(v);
    max_abs = std::max(max_abs, mag);
  }
  return accumulate_product(a, r.cols(), max_abs,
                            [&](std::size_t k, std::size_t j) { return static_cast<i128>(r.at(k, j)); });
}

ModMatrix add_mod(const ModMatrix& a, const ModMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "add_mod: shapes differ");
  require_same_q(a.q(), b.q());
  std::vector<u64> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = ahibet::add_mod(a.data()[i], b.data()[i], a.q());
  }
  return ModMatrix(a.rows(), a.cols(), a.q(), std::move(out));
}

ModMatrix hconcat(const ModMatrix& a, const ModMatrix& b) {
  require(a.rows() == b.rows(), "hconcat: row counts differ");
  require_same_q(a.q(), b.q());
  const std::size_t cols = a.cols() + b.cols();
  std::vector<u64> out(a.rows() * cols);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::copy(a.row(i).begin(), a.row(i).end(), out.begin() + i * cols);
    std::copy(b.row(i).begin(), b.row(i).end(),
              out.begin() + i * cols + a.cols());
  }
  return ModMatrix(a.rows(), cols, a.q(), std::move(out));
}

ModMatrix reduce_mod(const IntMatrix& r, u64 q) {
  std::vector<u64> out(r.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = reduce_signed(r.data()[i], q);
  }
  return ModMatrix(r.rows(), r.cols(), q, std::move(out));
}

IntMatrix center_lift(const ModMatrix& a) {
  std::vector<i64> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = center_lift(a.data()[i], a.q());
  }
  return IntMatrix(a.rows(), a.cols(), std::move(out));
}

ModVector vec_mat_mod(const ModVector& s, const ModMatrix& a) {
  require(s.size() == a.rows(), "vec_mat_mod: length differs from rows");
  require_same_q(s.q(), a.q());
  const u64 q = a.q();
  std::vector<u128> acc(a.cols(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const u64 si = s[i];
    if (si == 0) continue;
    auto row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      acc[j] = (acc[j] + static_cast<u128>(si) * row[j]) % q;
    }
  }
  std::vector<u64> out(a.cols());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = static_cast<u64>(acc[j]);
  return ModVector(std::move(out), q);
}

ModVector mat_vec_mod(const ModMatrix& a, std::span<const i64> x) {
  require(x.size() == a.cols(), "mat_vec_mod: length differs from cols");
  const u64 q = a.q();
  std::vector<u64> xr(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) xr[j] = reduce_signed(x[j], q);
  std::vector<u64> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    u128 acc = 0;
    auto row = a.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) {
      acc = (acc + static_cast<u128>(row[j]) * xr[j]) % q;
    }
    out[i] = static_cast<u64>(acc);
  }
  return ModVector(std::move(out), q);
}

// ------------------------------------------------------- integer products

IntMatrix int_mul(const IntMatrix& a, const IntMatrix& b) {
  require(a.cols() == b.rows(), "int_mul: inner dimensions differ");
  IntMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      CheckedAccumulator acc;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        const i64 x = a.at(i, k);
        if (x != 0) acc.add(x, b.at(k, j));
      }
      out.set(i, j, acc.result());
    }
  }
  return out;
}

IntMatrix hconcat(const IntMatrix& a, const IntMatrix& b) {
  require(a.rows() == b.rows(), "hconcat: row counts differ");
  IntMatrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out.set(i, j, a.at(i, j));
    for (std::size_t j = 0; j < b.cols(); ++j) {
      out.set(i, a.cols() + j, b.at(i, j));
    }
  }
  return out;
}

IntMatrix vconcat(const IntMatrix& a, const IntMatrix& b) {
  require(a.cols() == b.cols(), "vconcat: column counts differ");
  std::vector<i64> data(a.data().begin(), a.data().end());
  data.insert(data.end(), b.data().begin(), b.data().end());
  return IntMatrix(a.rows() + b.rows(), a.cols(), std::move(data));
}

IntMatrix negate(const IntMatrix& a) {
  std::vector<i64> data(a.data().size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = checked_mul(a.data()[i], -1);
  }
  return IntMatrix(a.rows(), a.cols(), std::move(data));
}

// ------------------------------------------------------------- solvers

ModVector solve_left(const ModMatrix& a, const ModVector& b) {
  require(b.size() == a.cols(), "solve_left: b length differs from cols");
  require_same_q(a.q(), b.q());
  const u64 q = a.q();
  if (!is_prime(q)) throw Error(Errc::kModulus, "solve_left needs prime q");
  const std::size_t n = a.rows();
  const std::size_t eqs = a.cols();
  const std::size_t width = n + 1;
  // Row j of the augmented system: column j of a, then b_j.
  std::vector<u64> m(eqs * width);
  for (std::size_t j = 0; j < eqs; ++j) {
    for (std::size_t i = 0; i < n; ++i) m[j * width + i] = a.at(i, j);
    m[j * width + n] = b[j];
  }
  std::size_t rank = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = rank;
    while (piv < eqs && m[piv * width + c] == 0) ++piv;
    if (piv == eqs) {
      throw Error(Errc::kRankDeficient, "solve_left: columns do not determine s");
    }
    if (piv != rank) {
      std::swap_ranges(m.begin() + piv * width, m.begin() + (piv + 1) * width,
                       m.begin() + rank * width);
    }
    const u64 inv = inv_mod(m[rank * width + c], q);
    for (std::size_t k = c; k < width; ++k) {
      m[rank * width + k] = mul_mod(m[rank * width + k], inv, q);
    }
    for (std::size_t r = 0; r < eqs; ++r) {
      if (r == rank) continue;
      const u64 f = m[r * width + c];
      if (f == 0) continue;
      for (std::size_t k = c; k < width; ++k) {
        m[r * width + k] =
            sub_mod(m[r * width + k], mul_mod(f, m[rank * width + k], q), q);
      }
    }
    ++rank;
  }
  for (std::size_t r = rank; r < eqs; ++r) {
    if (m[r * width + n] != 0) {
      throw Error(Errc::kInconsistent, "solve_left: no s satisfies s^T a = b^T");
    }
  }
  std::vector<u64> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = m[i * width + n];
  return ModVector(std::move(s), q);
}

namespace {

bool verify_left_int(const IntMatrix& t, const IntVector& x,
                     std::span<const i64> y) {
  for (std::size_t j = 0; j < t.cols(); ++j) {
    i128 acc = 0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      acc += static_cast<i128>(x[i]) * t.at(i, j);
    }
    if (acc != y[j]) return false;
  }
  return true;
}

// Floating LU with partial pivoting on t^T; nullopt if a pivot vanishes.
std::optional<IntVector> solve_int_float(const IntMatrix& t,
                                         std::span<const i64> y) {
  const std::size_t n = t.rows();
  std::vector<double> lu(n * n);  // row-major t^T
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      lu[j * n + i] = static_cast<double>(t.at(i, j));
    }
  }
  std::vector<double> rhs(y.begin(), y.end());
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    double best = std::abs(lu[c * n + c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double v = std::abs(lu[r * n + c]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) return std::nullopt;
    if (piv != c) {
      std::swap_ranges(lu.begin() + piv * n, lu.begin() + (piv + 1) * n,
                       lu.begin() + c * n);
      std::swap(rhs[piv], rhs[c]);
    }
    const double inv = 1.0 / lu[c * n + c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = lu[r * n + c] * inv;
      if (f == 0.0) continue;
      kernels::axpy(-f, &lu[c * n + c], &lu[r * n + c], n - c);
      rhs[r] -= f * rhs[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t c = n; c-- > 0;) {
    double acc = rhs[c];
    acc -= kernels::dot(&lu[c * n + c + 1], &x[c + 1], n - c - 1);
    x[c] = acc / lu[c * n + c];
  }
  IntVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::nearbyint(x[i]);
    if (!std::isfinite(r) || std::abs(r) > 9.0e15) return std::nullopt;
    out[i] = static_cast<i64>(r);
  }
  return out;
}

// Solves t^T x == y modulo p; nullopt if singular mod p.
std::optional<IntVector> solve_int_modp(const IntMatrix& t,
                                        std::span<const i64> y, u64 p) {
  const std::size_t n = t.rows();
  const std::size_t width = n + 1;
  std::vector<u64> m(n * width);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m[j * width + i] = reduce_signed(t.at(i, j), p);
    }
  }
  for (std::size_t j = 0; j < n; ++j) m[j * width + n] = reduce_signed(y[j], p);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv * width + c] == 0) ++piv;
    if (piv == n) return std::nullopt;
    if (piv != c) {
      std::swap_ranges(m.begin() + piv * width, m.begin() + (piv + 1) * width,
                       m.begin() + c * width);
    }
    const u64 inv = inv_mod(m[c * width + c], p);
    for (std::size_t k = c; k < width; ++k) {
      m[c * width + k] = mul_mod(m[c * width + k], inv, p);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const u64 f = m[r * width + c];
      if (f == 0) continue;
      for (std::size_t k = c; k < width; ++k) {
        m[r * width + k] = sub_mod(m[r * width + k], mul_mod(f, m[c * width + k], p), p);
      }
    }
  }
  IntVector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = center_lift(m[i * width + n], p);
  return out;
}

}  // namespace

IntVector solve_int(const IntMatrix& t, std::span<const i64> y) {
  require(t.rows() == t.cols(), "solve_int: matrix must be square");
  require(y.size() == t.cols(), "solve_int: rhs length differs");
  if (auto x = solve_int_float(t, y); x && verify_left_int(t, *x, y)) {
    return *x;
  }
  // Exact fallback: the solution is unique, so an integral one with entries
  // below p/2 is recovered by any prime p for which t is invertible.
  bool invertible_somewhere = false;
  for (u64 p : {(u64{1} << 61) - 1, u64{2305843009213693921ull}}) {
    auto x = solve_int_modp(t, y, p);
    if (!x) continue;
    invertible_somewhere = true;
    if (verify_left_int(t, *x, y)) return *x;
  }
  if (!invertible_somewhere) throw Error(Errc::kSingular, "solve_int: singular matrix");
  throw Error(Errc::kNonIntegral, "solve_int: solution is not integral");
}

ModMatrix inverse_mod(const ModMatrix& a) {
  require(a.rows() == a.cols(), "inverse_mod: matrix must be square");
  const std::size_t n = a.rows();
  const u64 q = a.q();
  const std::size_t width = 2 * n;
  std::vector<u64> m(n * width, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i * width + j] = a.at(i, j);
    m[i * width + n + i] = 1 % q;
  }
  auto row = [&](std::size_t r) { return m.begin() + r * width; };
  // row_r -= f * row_p
  auto sub_row = [&](std::size_t r, std::size_t p, u64 f) {
    for (std::size_t k = 0; k < width; ++k) {
      m[r * width + k] = sub_mod(m[r * width + k], mul_mod(f, m[p * width + k], q), q);
    }
  };
  for (std::size_t c = 0; c < n; ++c) {
    // Euclid on column c over rows c..n-1 until a single nonzero remains.
    for (;;) {
      std::size_t best = n;
      std::size_t nonzero = 0;
      for (std::size_t r = c; r < n; ++r) {
        const u64 v = m[r * width + c];
        if (v == 0) continue;
        ++nonzero;
        if (best == n || v < m[best * width + c]) best = r;
      }
      if (best == n) throw Error(Errc::kSingular, "inverse_mod: singular matrix");
      if (best != c) std::swap_ranges(row(best), row(best) + width, row(c));
      if (nonzero == 1) break;
      const u64 p = m[c * width + c];
      for (std::size_t r = c + 1; r < n; ++r) {
        const u64 v = m[r * width + c];
        if (v != 0) sub_row(r, c, v / p);
      }
    }
    const u64 inv = inv_mod(m[c * width + c], q);
    for (std::size_t k = 0; k < width; ++k) {
      m[c * width + k] = mul_mod(m[c * width + k], inv, q);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const u64 f = m[r * width + c];
      if (f != 0) sub_row(r, c, f);
    }
  }
  std::vector<u64> out(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(row(i) + n, n, out.begin() + i * n);
  }
  return ModMatrix(n, n, q, std::move(out));
}

std::size_t rank_mod(const ModMatrix& a) {
  const u64 q = a.q();
  if (!is_prime(q)) throw Error(Errc::kModulus, "rank_mod needs prime q");
  std::vector<u64> m(a.data().begin(), a.data().end());
  const std::size_t rows = a.rows(), cols = a.cols();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && m[piv * cols + c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap_ranges(m.begin() + piv * cols, m.begin() + (piv + 1) * cols,
                     m.begin() + rank * cols);
    const u64 inv = inv_mod(m[rank * cols + c], q);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      const u64 f = mul_mod(m[r * cols + c], inv, q);
      if (f == 0) continue;
      for (std::size_t k = c; k < cols; ++k) {
        m[r * cols + k] = sub_mod(m[r * cols + k], mul_mod(f, m[rank * cols + k], q), q);
      }
    }
    ++rank;
  }
  return rank;
}

RightSolver::RightSolver(const ModMatrix& f)
    : n_(f.rows()), width_(f.cols()), q_(f.q()) {
  const std::size_t n = n_, w = width_;
  const u64 q = q_;
  // Gauss-Jordan on [f | I_n] with unit pivots.
  const std::size_t stride = w + n;
  std::vector<u64> m(n * stride, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(f.row(i).begin(), f.row(i).end(), m.begin() + i * stride);
    m[i * stride + w + i] = 1 % q;
  }
  std::vector<bool> used(w, false);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t pr = n, pc = w;
    for (std::size_t rr = r; rr < n && pr == n; ++rr) {
      for (std::size_t c = 0; c < w; ++c) {
        const u64 v = m[rr * stride + c];
        if (!used[c] && v != 0 && std::gcd(v, q) == 1) {
          pr = rr;
          pc = c;
          break;
        }
      }
    }
    if (pr == n) {
      throw Error(Errc::kRankDeficient, "matrix is not surjective mod q");
    }
    if (pr != r) {
      std::swap_ranges(m.begin() + pr * stride, m.begin() + (pr + 1) * stride,
                       m.begin() + r * stride);
    }
    const u64 inv = inv_mod(m[r * stride + pc], q);
    for (std::size_t k = 0; k < stride; ++k) {
      m[r * stride + k] = mul_mod(m[r * stride + k], inv, q);
    }
    for (std::size_t rr = 0; rr < n; ++rr) {
      if (rr == r) continue;
      const u64 fct = m[rr * stride + pc];
      if (fct == 0) continue;
      for (std::size_t k = 0; k < stride; ++k) {
        m[rr * stride + k] =
            sub_mod(m[rr * stride + k], mul_mod(fct, m[r * stride + k], q), q);
      }
    }
    used[pc] = true;
    pivots_.push_back(pc);
  }
  std::vector<u64> t(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(m.begin() + i * stride + w, n, t.begin() + i * n);
  }
  transform_ = ModMatrix(n, n, q, std::move(t));
}

IntVector RightSolver::solve(const ModVector& u) const {
  require(u.size() == n_, "RightSolver: target length differs from rows");
  require_same_q(u.q(), q_);
  IntVector x(width_, 0);
  for (std::size_t i = 0; i < n_; ++i) {
    u128 acc = 0;
    for (std::size_t k = 0; k < n_; ++k) {
      acc = (acc + static_cast<u128>(transform_.at(i, k)) * u[k]) % q_;
    }
    x[pivots_[i]] = static_cast<i64>(acc);
  }
  return x;
}

u64 det_mod_prime(const IntMatrix& a, u64 p) {
  require(a.rows() == a.cols(), "det_mod_prime: matrix must be square");
  if (p < (u64{1} << 31)) {
    detail::ModPrimeMatrix m(a, p);
    return m.determinant();
  }
  const std::size_t n = a.rows();
  std::vector<u64> m(n * n);
  for (std::size_t i = 0; i < n * n; ++i) m[i] = reduce_signed(a.data()[i], p);
  u64 det = 1 % p;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv * n + c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap_ranges(m.begin() + piv * n, m.begin() + (piv + 1) * n,
                       m.begin() + c * n);
      det = neg_mod(det, p);
    }
    det = mul_mod(det, m[c * n + c], p);
    const u64 inv = inv_mod(m[c * n + c], p);
    for (std::size_t r = c + 1; r < n; ++r) {
      const u64 f = mul_mod(m[r * n + c], inv, p);
      if (f == 0) continue;
      for (std::size_t k = c; k < n; ++k) {
        m[r * n + k] = sub_mod(m[r * n + k], mul_mod(f, m[c * n + k], p), p);
      }
    }
  }
  return det;
}

// ------------------------------------------------------- real quantities

std::vector<double> to_column_major(const IntMatrix& b) {
  std::vector<double> out(b.rows() * b.cols());
  for (std::size_t i = 0; i < b.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      out[j * b.rows() + i] = static_cast<double>(b.at(i, j));
    }
  }
  return out;
}

GramSchmidtData gram_schmidt(const IntMatrix& b) {
  GramSchmidtData gs;
  gs.dim = b.rows();
  gs.count = b.cols();
  gs.ortho = to_column_major(b);
  gs.norms.resize(gs.count);
  std::vector<double> inv_sq(gs.count);
  const std::size_t dim = gs.dim;
  for (std::size_t i = 0; i < gs.count; ++i) {
    double* v = gs.ortho.data() + i * dim;
    const double original = kernels::dot(v, v, dim);
    for (std::size_t j = 0; j < i; ++j) {
      const double* u = gs.ortho.data() + j * dim;
      const double mu = kernels::dot(v, u, dim) * inv_sq[j];
      if (mu != 0.0) kernels::axpy(-mu, u, v, dim);
    }
    const double sq = kernels::dot(v, v, dim);
    if (!(sq > 1e-18 * original) || original == 0.0) {
      throw Error(Errc::kRankDeficient,
                  "gram_schmidt: column " + std::to_string(i) +
                      " depends on earlier columns");
    }
    inv_sq[i] = 1.0 / sq;
    gs.norms[i] = std::sqrt(sq);
    gs.max_norm = std::max(gs.max_norm, gs.norms[i]);
  }
  return gs;
}

double s1_upper(const IntMatrix& r) {
  const std::size_t rows = r.rows(), cols = r.cols();
  if (rows == 0 || cols == 0) return 0.0;
  const std::vector<double> cm = to_column_major(r);
  std::vector<double> v(cols), w(rows);
  for (std::size_t j = 0; j < cols; ++j) v[j] = 1.0 + 0.1 * static_cast<double>(j % 7);
  auto normalize = [](std::vector<double>& x) {
    const double nrm = std::sqrt(kernels::dot(x.data(), x.data(), x.size()));
    if (nrm == 0.0) return false;
    for (double& e : x) e /= nrm;
    return true;
  };
  normalize(v);
  double estimate = 0.0;
  for (int it = 0; it < 100; ++it) {
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
      kernels::axpy(v[j], cm.data() + j * rows, w.data(), rows);
    }
    estimate = std::sqrt(kernels::dot(w.data(), w.data(), rows));
    if (estimate == 0.0) return 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      v[j] = kernels::dot(cm.data() + j * rows, w.data(), rows);
    }
    if (!normalize(v)) return 0.0;
  }
  return estimate * 1.01;
}

}  // namespace ahibet
