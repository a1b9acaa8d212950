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

#ifndef AHIBET_SRC_EXACT_SOLVE_HPP_
#define AHIBET_SRC_EXACT_SOLVE_HPP_

#include <gmpxx.h>

#include <memory>
#include <span>
#include <vector>

#include "ahibet/matrix.hpp"

namespace ahibet::detail {

class ModPrimeLu;

// x = num / denom with denom > 0.
struct RationalVector {
  mpz_class denom;
  std::vector<mpz_class> num;
};

// Exact rational solver for a fixed nonsingular a with entries below 2^31,
// by p-adic lifting over a word-size prime and rational reconstruction.
// Throws Errc::kSingular for singular a.
class RationalSolver {
 public:
  explicit RationalSolver(const IntMatrix& a);
  ~RationalSolver();

  // a x = rhs, verified by multiplying back.
  RationalVector solve(std::span<const i64> rhs) const;

 private:
  const IntMatrix& a_;
  std::unique_ptr<ModPrimeLu> lu_;
  double log2_h_ = 0.0;
  bool narrow_ = false;
};

// Exact rational solutions of a x = rhs_k for every column of rhs, by p-adic
// lifting over a word-size prime and rational reconstruction. Every result is
// verified by multiplying back. Throws Errc::kSingular for singular a.
std::vector<RationalVector> solve_rational(const IntMatrix& a,
                                           const IntMatrix& rhs);

}  // namespace ahibet::detail

#endif  // AHIBET_SRC_EXACT_SOLVE_HPP_
