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

#ifndef AHIBET_IDENTITY_HPP_
#define AHIBET_IDENTITY_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ahibet/matrix.hpp"

namespace ahibet {

// Hierarchical identity: nonzero components in Z_q^n, outermost first.
class IdentityPath {
 public:
  // Throws Errc::kDimension on empty path or mixed shapes and
  // Errc::kPrecondition on a zero component.
  explicit IdentityPath(std::vector<ModVector> components);

  std::size_t depth() const { return components_.size(); }
  std::size_t n() const { return components_.front().size(); }
  u64 q() const { return components_.front().q(); }
  const std::vector<ModVector>& components() const { return components_; }
  const ModVector& component(std::size_t i) const { return components_.at(i); }

  IdentityPath prefix(std::size_t len) const;
  IdentityPath child(const ModVector& component) const;
  bool is_prefix_of(const IdentityPath& other) const;

  bool operator==(const IdentityPath&) const = default;

 private:
  std::vector<ModVector> components_;
};

// Modulus polynomial for the full-rank-difference encoding: f = x^n +
// sum_i coeffs[i] x^i, irreducible over Z_q.
struct FrdContext {
  std::size_t n = 0;
  u64 q = 0;
  std::vector<u64> coeffs;  // c_0 .. c_{n-1}
};

// Rabin's test for a monic polynomial given by its low coefficients.
bool is_irreducible(std::span<const u64> low_coeffs, u64 q);

// First monic irreducible polynomial of degree n when candidates are
// enumerated with c_0 varying fastest. Requires q prime.
FrdContext find_irreducible(std::size_t n, u64 q);

// Matrix of multiplication by g_u = sum_i u_i x^i in Z_q[x]/(f); column j
// holds x^j g_u mod f.
ModMatrix frd(const FrdContext& ctx, const ModVector& u);

// SHAKE-256 of the framed path, mapped to Z_q^n by rejection sampling of
// 8-byte little-endian chunks.
ModVector hash_to_zqn(const FrdContext& ctx, const IdentityPath& path);

// Canonical framing fed to the hash: depth, then per component its length
// and coordinates, all as 8-byte little-endian words.
std::vector<std::uint8_t> frame_path(const IdentityPath& path);

// 0 iff x is strictly closer (circularly) to 0 than to floor(q/2).
int round_bit(u64 x, u64 q);
std::vector<int> round_vec(const ModVector& v);

}  // namespace ahibet

#endif  // AHIBET_IDENTITY_HPP_
