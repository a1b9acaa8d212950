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

#include "exact_solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>

#include "ahibet/errors.hpp"
#include "modp_internal.hpp"

namespace ahibet::detail {

namespace {

// x == n / d (mod m) with |n|, d <= bound, if such a pair exists.
std::optional<std::pair<mpz_class, mpz_class>> reconstruct(const mpz_class& x,
                                                           const mpz_class& m,
                                                           const mpz_class& bound) {
  mpz_class r0 = m, r1 = x % m;
  if (r1 < 0) r1 += m;
  mpz_class t0 = 0, t1 = 1, quo, tmp;
  while (r1 > bound) {
    mpz_fdiv_q(quo.get_mpz_t(), r0.get_mpz_t(), r1.get_mpz_t());
    tmp = r0 - quo * r1;
    r0 = r1;
    r1 = tmp;
    tmp = t0 - quo * t1;
    t0 = t1;
    t1 = tmp;
  }
  if (t1 < 0) {
    t1 = -t1;
    r1 = -r1;
  }
  if (t1 == 0 || t1 > bound) return std::nullopt;
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), t1.get_mpz_t());
  if (g != 1) return std::nullopt;
  return std::make_pair(r1, t1);
}

bool verify(const IntMatrix& a, std::span<const i64> rhs, const RationalVector& x) {
  const std::size_t n = a.rows();
  mpz_class acc, target;
  for (std::size_t i = 0; i < n; ++i) {
    acc = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const i64 v = a.at(i, k);
      if (v > 0) {
        mpz_addmul_ui(acc.get_mpz_t(), x.num[k].get_mpz_t(), static_cast<unsigned long>(v));
      } else if (v < 0) {
        mpz_submul_ui(acc.get_mpz_t(), x.num[k].get_mpz_t(), static_cast<unsigned long>(-v));
      }
    }
    target = x.denom * static_cast<long>(rhs[i]);
    if (acc != target) return false;
  }
  return true;
}

}  // namespace

RationalSolver::RationalSolver(const IntMatrix& a) : a_(a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw Error(Errc::kDimension, "solve_rational: matrix is not square");
  if (a.max_abs() >= (i64{1} << 31)) {
    throw Error(Errc::kOverflow, "solve_rational: entries must stay below 2^31");
  }
  for (u64 p : {2147483647ull, 2147483629ull, 2147483587ull, 2147483579ull,
                2147483563ull}) {
    lu_ = std::make_unique<ModPrimeLu>(a, p);
    if (lu_->invertible()) break;
    lu_.reset();
  }
  if (!lu_) throw Error(Errc::kSingular, "solve_rational: matrix is singular");

  // Hadamard bound on |det a| and on the Cramer numerators.
  for (std::size_t j = 0; j < n; ++j) {
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = static_cast<double>(a.at(i, j));
      sq += v * v;
    }
    log2_h_ += 0.5 * std::log2(std::max(sq, 1.0));
  }
  // Row sums of |a| times p fit in an i64.
  i64 max_row = 0;
  for (std::size_t i = 0; i < n; ++i) {
    i64 sum = 0;
    for (std::size_t k = 0; k < n; ++k) sum += std::abs(a.at(i, k));
    max_row = std::max(max_row, sum);
  }
  narrow_ = max_row < (i64{1} << 31);
}

RationalSolver::~RationalSolver() = default;

RationalVector RationalSolver::solve(std::span<const i64> rhs) const {
  const IntMatrix& a = a_;
  const std::size_t n = a.rows();
  if (rhs.size() != n) throw Error(Errc::kDimension, "solve_rational: shapes disagree");
  const u64 p = lu_->p();
  double bsq = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(rhs[i]) >= (i64{1} << 31)) {
      throw Error(Errc::kOverflow, "solve_rational: entries must stay below 2^31");
    }
    const double v = static_cast<double>(rhs[i]);
    bsq += v * v;
  }
  const double need_bits = 2.0 * log2_h_ + 0.5 * std::log2(bsq) + 4.0;
  const std::size_t steps =
      static_cast<std::size_t>(std::ceil(need_bits / std::log2(static_cast<double>(p)))) + 1;

  // Lifting: a (x_0 + x_1 p + ...) == b (mod p^steps).
  std::vector<u64> reduced(n), digit(n);
  std::vector<i64> residual(rhs.begin(), rhs.end());
  std::vector<std::vector<u64>> digits(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) reduced[i] = reduce_signed(residual[i], p);
    lu_->solve(reduced, digit);
    for (std::size_t i = 0; i < n; ++i) {
      const i64* row = a.data().data() + i * n;
      i128 acc = residual[i];
      if (narrow_) {
        i64 acc64 = 0;
        for (std::size_t k = 0; k < n; ++k) acc64 += row[k] * static_cast<i64>(digit[k]);
        acc -= acc64;
      } else {
        for (std::size_t k = 0; k < n; ++k) {
          acc -= static_cast<i128>(row[k]) * static_cast<i128>(digit[k]);
        }
      }
      if (acc % static_cast<i128>(p) != 0) {
        throw Error(Errc::kInconsistent, "solve_rational: lifting step not exact");
      }
      residual[i] = static_cast<i64>(acc / static_cast<i128>(p));
    }
    digits[s] = digit;
  }
  mpz_class modulus;
  mpz_ui_pow_ui(modulus.get_mpz_t(), p, steps);
  mpz_class bound;
  mpz_class half = modulus / 2;
  mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());

  RationalVector x;
  x.denom = 1;
  x.num.resize(n);
  mpz_class value, scaled;
  for (std::size_t k = 0; k < n; ++k) {
    value = 0;
    for (std::size_t s = steps; s-- > 0;) {
      value *= static_cast<unsigned long>(p);
      value += static_cast<unsigned long>(digits[s][k]);
    }
    // Try the running denominator first; reconstruct only when it fails.
    scaled = (value * x.denom) % modulus;
    if (scaled > half) scaled -= modulus;
    if (abs(scaled) <= bound) {
      x.num[k] = scaled;
      continue;
    }
    const auto nd = reconstruct(scaled, modulus, bound);
    if (!nd) throw Error(Errc::kInconsistent, "solve_rational: reconstruction failed");
    for (std::size_t j = 0; j < k; ++j) x.num[j] *= nd->second;
    x.denom *= nd->second;
    x.num[k] = nd->first;
  }
  if (!verify(a, rhs, x)) {
    throw Error(Errc::kInconsistent, "solve_rational: solution does not verify");
  }
  return x;
}

std::vector<RationalVector> solve_rational(const IntMatrix& a,
                                           const IntMatrix& rhs) {
  if (rhs.rows() != a.rows()) throw Error(Errc::kDimension, "solve_rational: shapes disagree");
  const RationalSolver solver(a);
  std::vector<RationalVector> out;
  for (std::size_t col = 0; col < rhs.cols(); ++col) {
    const IntVector b = rhs.column(col);
    out.push_back(solver.solve(b));
  }
  return out;
}

}  // namespace ahibet::detail
