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

#ifndef AHIBET_TRAPDOOR_HPP_
#define AHIBET_TRAPDOOR_HPP_

#include <cstddef>
#include <memory>
#include <optional>

#include "ahibet/gaussian.hpp"
#include "ahibet/matrix.hpp"
#include "ahibet/random.hpp"

namespace ahibet {

namespace detail {
struct Completion;
struct BasisCache;
class BasisAccess;
}  // namespace detail

// Basis of the q-ary lattice {x : for_matrix * x == 0 mod q}. Construction
// checks membership and full rank and computes the Gram-Schmidt data.
//
// Bases produced by sample_basis_right / sample_basis_left keep the flag of
// the Gaussian samples they come from, which leaves one column whose
// Gram-Schmidt vector is far below double precision. That column is stored
// together with an exact rational description (see has_completion()) and all
// samplers in this header handle it exactly; gs().norms holds 0 or a
// subnormal value for it.
class ShortBasis {
 public:
  ShortBasis(ModMatrix for_matrix, IntMatrix b);

  const ModMatrix& for_matrix() const { return for_matrix_; }
  const IntMatrix& b() const { return b_; }
  const GramSchmidtData& gs() const { return *gs_; }
  double gs_norm() const { return gs_->max_norm; }
  std::size_t dim() const { return b_.cols(); }

  bool has_completion() const { return completion_ != nullptr; }
  // log |det b|, exact to double precision even with a completed column.
  double log_volume() const;

 private:
  friend class detail::BasisAccess;
  ShortBasis() = default;

  ModMatrix for_matrix_;
  IntMatrix b_;
  std::shared_ptr<const GramSchmidtData> gs_;
  std::shared_ptr<const detail::Completion> completion_;
  std::shared_ptr<detail::BasisCache> cache_;
};

// F = [A | A R + H G] together with R and the tag H.
struct GadgetTrapdoor {
  ModMatrix a;
  IntMatrix r;
  ModMatrix tag;
  ModMatrix f;
};

// Counters from the basis-completion loops.
struct SamplingStats {
  std::size_t draws = 0;
};

// G = I_n (x) (1, 2, ..., 2^{k-1}) with k = ceil(log2 q).
ModMatrix gadget_matrix(std::size_t n, u64 q);
ShortBasis gadget_basis(std::size_t n, u64 q);
// Binary x with G x == v (mod q).
IntVector gadget_solve(std::size_t n, u64 q, const ModVector& v);

// Builds F from (A, R, H) and checks F [-R; I] == H G. Throws Errc::kSingular
// if H is not invertible.
GadgetTrapdoor make_trapdoor(ModMatrix a, IntMatrix r, ModMatrix tag);
GadgetTrapdoor trap_gen(std::size_t n, std::size_t m, u64 q, const ModMatrix& tag,
                        double sigma_r, RandomSource& rng);
// The concrete trapdoor width sqrt(ln(2n) + 10).
double default_trapdoor_width(std::size_t n);

ShortBasis trapdoor_to_basis(const GadgetTrapdoor& t);

// Discrete Gaussian sample of width sigma over the lattice of `basis` around
// `center` (randomized nearest plane, last column first).
IntVector sample_lattice(const ShortBasis& basis, double sigma,
                         std::span<const double> center, RandomSource& rng);

// Each column of the result x satisfies f x == u_col and follows the discrete
// Gaussian of width sigma over that coset.
IntMatrix sample_pre(const ModMatrix& f, const ShortBasis& basis,
                     const ModMatrix& u, double sigma, RandomSource& rng);

// Smallest width accepted by sample_right / sample_basis_right.
double sample_right_min_sigma(const GadgetTrapdoor& t);
IntMatrix sample_right(const GadgetTrapdoor& t, const ModMatrix& u,
                       double sigma, RandomSource& rng);
ShortBasis sample_basis_right(const GadgetTrapdoor& t, double sigma,
                              RandomSource& rng, SamplingStats* stats = nullptr);
ShortBasis sample_basis_left(const ModMatrix& a, const ModMatrix& m_ext,
                             const ShortBasis& t_a, double sigma,
                             RandomSource& rng, SamplingStats* stats = nullptr);

// Deterministic basis of [a1 | a2 | a3] whose Gram-Schmidt norm equals that
// of t2. Any of a1, a3 may have zero columns.
ShortBasis extend_basis(const ModMatrix& a1, const ModMatrix& a2,
                        const ModMatrix& a3, const ShortBasis& t2);

// Turns a full-rank set of lattice vectors into a basis of the lattice of
// `reference` without increasing the Gram-Schmidt norm.
ShortBasis to_basis(const IntMatrix& independent, const ShortBasis& reference);

struct LweSolution {
  ModVector s;
  IntVector e;
  i64 noise_inf = 0;  // |e^T T|_inf as observed
};

// Recovers (s, e) from y = s^T a + e^T. Throws Errc::kNoiseBound when the
// centred y^T T reaches q/4, Errc::kNonIntegral when e is not integral.
LweSolution invert_lwe(const ModMatrix& a, const ShortBasis& t,
                       const ModVector& y);

}  // namespace ahibet

#endif  // AHIBET_TRAPDOOR_HPP_
