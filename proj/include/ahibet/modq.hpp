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

#ifndef AHIBET_MODQ_HPP_
#define AHIBET_MODQ_HPP_

#include <cstdint>
#include <vector>

namespace ahibet {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline u64 add_mod(u64 a, u64 b, u64 q) {
  u64 s = a + b;
  return (s >= q || s < a) ? s - q : s;
}

inline u64 sub_mod(u64 a, u64 b, u64 q) { return a >= b ? a - b : a + (q - b); }

inline u64 mul_mod(u64 a, u64 b, u64 q) {
  return static_cast<u64>((static_cast<u128>(a) * b) % q);
}

inline u64 neg_mod(u64 a, u64 q) { return a == 0 ? 0 : q - a; }

// Reduces a signed integer into [0, q).
inline u64 reduce_signed(i64 x, u64 q) {
  if (x >= 0) return static_cast<u64>(x) % q;
  // -(x + 1) cannot overflow, and -x == -(x + 1) + 1.
  const u64 m = static_cast<u64>(-(x + 1)) % q;
  return q - 1 - m;
}

// Unique representative of x in (-q/2, q/2]. Requires 0 <= x < q.
i64 center_lift(u64 x, u64 q);

u64 pow_mod(u64 base, u64 exp, u64 q);

// Inverse of a modulo q; throws Errc::kSingular when gcd(a, q) != 1.
u64 inv_mod(u64 a, u64 q);

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(u64 n);

// Smallest prime >= n. Throws Errc::kInfeasible past 2^63.
u64 next_prime(u64 n);

// ceil(log2(q)) for q >= 2.
unsigned ceil_log2(u64 q);

// Prime factorization with multiplicity, ascending.
std::vector<u64> factorize(u64 n);

}  // namespace ahibet

#endif  // AHIBET_MODQ_HPP_
