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

#ifndef AHIBET_SRC_BASIS_INTERNAL_HPP_
#define AHIBET_SRC_BASIS_INTERNAL_HPP_

#include <gmpxx.h>

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "ahibet/trapdoor.hpp"
#include "modp_internal.hpp"

namespace ahibet::detail {

// Column `column` of the basis equals
//   sum_{i < column} (coeff[i] / denom) b_i + aux / index
// exactly, where aux is a short lattice-independent vector whose
// Gram-Schmidt component against the preceding columns has norm aux_norm.
// The column's own Gram-Schmidt vector is (that component) / index.
struct Completion {
  std::size_t column = 0;
  IntVector aux;
  std::vector<double> aux_gs;  // Gram-Schmidt vector of aux
  double aux_norm = 0.0;
  std::vector<mpz_class> coeff;
  mpz_class denom;
  mpz_class index;
  // floor(coeff_i 2^shift / denom): frac(z coeff_i / denom) to ~2^-64 for
  // |z| < 2^(shift - 64) without a long division per coefficient.
  unsigned long shift = 0;
  std::vector<mpz_class> scaled;

  void prepare();
};

struct BasisCache {
  std::once_flag once;
  std::optional<ModPrimeLu> lu_transposed;
  std::once_flag cols_once;
  std::vector<double> cols;  // column-major copy of the basis
};

class BasisAccess {
 public:
  // Trusts gs; checks membership only.
  static ShortBasis make(ModMatrix f, IntMatrix b, GramSchmidtData gs,
                         std::shared_ptr<const Completion> completion);
  // Rebuilds a basis from its stored parts. Only column, aux, coeff, denom
  // and index of `completion` are read; the identity defining the completed
  // column is verified exactly.
  static ShortBasis restore(ModMatrix f, IntMatrix b, std::optional<Completion> completion);
  static const Completion* completion(const ShortBasis& basis) {
    return basis.completion_.get();
  }
  // LU of b^T modulo a 31-bit prime, built on first use.
  static const ModPrimeLu* transposed_lu(const ShortBasis& basis);
  static const std::vector<double>& columns(const ShortBasis& basis);
};

}  // namespace ahibet::detail

#endif  // AHIBET_SRC_BASIS_INTERNAL_HPP_
