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

#include "ahibet/identity.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>
#include <utility>

#include "ahibet/errors.hpp"

namespace ahibet {

// ------------------------------------------------------------ IdentityPath

IdentityPath::IdentityPath(std::vector<ModVector> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw Error(Errc::kDimension, "identity path is empty");
  const std::size_t n = components_.front().size();
  const u64 q = components_.front().q();
  if (n == 0) throw Error(Errc::kDimension, "identity components are empty");
  for (const ModVector& c : components_) {
    if (c.size() != n || c.q() != q) {
      throw Error(Errc::kDimension, "identity components differ in shape");
    }
    const auto v = c.values();
    if (std::all_of(v.begin(), v.end(), [](u64 x) { return x == 0; })) {
      throw Error(Errc::kPrecondition, "identity component is zero");
    }
  }
}

IdentityPath IdentityPath::prefix(std::size_t len) const {
  if (len == 0 || len > depth()) throw Error(Errc::kDimension, "bad prefix length");
  return IdentityPath(std::vector<ModVector>(components_.begin(), components_.begin() + len));
}

IdentityPath IdentityPath::child(const ModVector& component) const {
  std::vector<ModVector> c = components_;
  c.push_back(component);
  return IdentityPath(std::move(c));
}

bool IdentityPath::is_prefix_of(const IdentityPath& other) const {
  return depth() <= other.depth() &&
         std::equal(components_.begin(), components_.end(), other.components_.begin());
}

// ----------------------------------------------------------- polynomials

namespace {

using Poly = std::vector<u64>;  // coefficients, low degree first

// a * b mod f, with f monic of degree n given by its low coefficients.
Poly mul_mod_poly(const Poly& a, const Poly& b, std::span<const u64> f, u64 q) {
  const std::size_t n = f.size();
  std::vector<u64> prod(2 * n - 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      prod[i + j] = add_mod(prod[i + j], mul_mod(a[i], b[j], q), q);
    }
  }
  for (std::size_t d = prod.size(); d-- > n;) {
    const u64 top = prod[d];
    if (top == 0) continue;
    // x^d = x^(d-n) x^n = -x^(d-n) sum f_i x^i
    for (std::size_t i = 0; i < n; ++i) {
      prod[d - n + i] = sub_mod(prod[d - n + i], mul_mod(top, f[i], q), q);
    }
  }
  prod.resize(n);
  return prod;
}

Poly pow_poly(Poly base, u64 e, std::span<const u64> f, u64 q) {
  Poly out(f.size(), 0);
  out[0] = 1 % q;
  while (e > 0) {
    if (e & 1) out = mul_mod_poly(out, base, f, q);
    base = mul_mod_poly(base, base, f, q);
    e >>= 1;
  }
  return out;
}

// x reduced mod f.
Poly x_poly(std::span<const u64> f, u64 q) {
  Poly x(f.size(), 0);
  if (f.size() > 1) {
    x[1] = 1;
  } else {
    x[0] = neg_mod(f[0], q);
  }
  return x;
}

// x^(q^k) mod f by k Frobenius steps.
Poly frobenius(std::size_t k, std::span<const u64> f, u64 q) {
  Poly p = x_poly(f, q);
  for (std::size_t i = 0; i < k; ++i) p = pow_poly(p, q, f, q);
  return p;
}

std::size_t degree(const Poly& p) {
  std::size_t d = p.size();
  while (d > 0 && p[d - 1] == 0) --d;
  return d == 0 ? 0 : d - 1;
}

bool is_zero_poly(const Poly& p) {
  return std::all_of(p.begin(), p.end(), [](u64 v) { return v == 0; });
}

// gcd of general polynomials over Z_q (q prime); result monic.
Poly gcd_poly(Poly a, Poly b, u64 q) {
  auto trim = [](Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
  };
  trim(a);
  trim(b);
  while (!b.empty()) {
    const u64 inv = inv_mod(b.back(), q);
    while (a.size() >= b.size()) {
      const u64 factor = mul_mod(a.back(), inv, q);
      const std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) {
        a[shift + i] = sub_mod(a[shift + i], mul_mod(factor, b[i], q), q);
      }
      trim(a);
    }
    std::swap(a, b);
  }
  if (!a.empty()) {
    const u64 inv = inv_mod(a.back(), q);
    for (auto& c : a) c = mul_mod(c, inv, q);
  }
  return a;
}

std::vector<std::size_t> prime_divisors(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

bool is_irreducible(std::span<const u64> low, u64 q) {
  const std::size_t n = low.size();
  if (n == 0) throw Error(Errc::kDimension, "polynomial degree must be positive");
  if (n == 1) return true;
  const Poly x = x_poly(low, q);
  Poly full(low.begin(), low.end());
  full.push_back(1);
  // x^(q^n) == x mod f, and gcd(x^(q^(n/p)) - x, f) == 1 for primes p | n.
  if (frobenius(n, low, q) != x) return false;
  for (std::size_t p : prime_divisors(n)) {
    Poly h = frobenius(n / p, low, q);
    h[1] = sub_mod(h[1], 1, q);
    if (is_zero_poly(h)) return false;
    const Poly g = gcd_poly(full, h, q);
    if (degree(g) != 0 || g.empty()) return false;
  }
  return true;
}

FrdContext find_irreducible(std::size_t n, u64 q) {
  if (n == 0 || !is_prime(q)) throw Error(Errc::kModulus, "find_irreducible needs n >= 1 and q prime");
  std::vector<u64> c(n, 0);
  while (true) {
    if (is_irreducible(c, q)) return FrdContext{n, q, c};
    std::size_t i = 0;
    while (i < n && ++c[i] == q) c[i++] = 0;
    if (i == n) throw Error(Errc::kInfeasible, "no irreducible polynomial found");
  }
}

ModMatrix frd(const FrdContext& ctx, const ModVector& u) {
  const std::size_t n = ctx.n;
  const u64 q = ctx.q;
  if (u.size() != n || u.q() != q) throw Error(Errc::kDimension, "frd: vector shape");
  ModMatrix out(n, n, q);
  std::vector<u64> col(u.values().begin(), u.values().end());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) out.set(i, j, col[i]);
    // col <- x col mod f
    const u64 top = col[n - 1];
    for (std::size_t i = n - 1; i > 0; --i) col[i] = col[i - 1];
    col[0] = 0;
    for (std::size_t i = 0; i < n; ++i) col[i] = sub_mod(col[i], mul_mod(top, ctx.coeffs[i], q), q);
  }
  return out;
}

// --------------------------------------------------------------- hashing

namespace {

void put_u64(std::vector<std::uint8_t>& out, u64 v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::vector<std::uint8_t> shake256(std::span<const std::uint8_t> in, std::size_t len) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::vector<std::uint8_t> out(len);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_shake256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), in.data(), in.size()) != 1 ||
      EVP_DigestFinalXOF(ctx.get(), out.data(), out.size()) != 1) {
    throw Error(Errc::kInconsistent, "SHAKE-256 failed");
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> frame_path(const IdentityPath& path) {
  std::vector<std::uint8_t> out;
  put_u64(out, path.depth());
  for (const ModVector& c : path.components()) {
    put_u64(out, c.size());
    for (u64 v : c.values()) put_u64(out, v);
  }
  return out;
}

ModVector hash_to_zqn(const FrdContext& ctx, const IdentityPath& path) {
  if (path.n() != ctx.n || path.q() != ctx.q) {
    throw Error(Errc::kDimension, "hash_to_zqn: path does not match the context");
  }
  const u64 q = ctx.q;
  // Accept v below the largest multiple of q not exceeding 2^64.
  const u64 excess = (~u64{0} % q + 1) % q;  // 2^64 mod q
  const u64 last_ok = ~u64{0} - excess;
  const std::vector<std::uint8_t> msg = frame_path(path);
  std::size_t len = 8 * ctx.n * 2;
  while (true) {
    const std::vector<std::uint8_t> stream = shake256(msg, len);
    std::vector<u64> out;
    for (std::size_t off = 0; off + 8 <= stream.size() && out.size() < ctx.n; off += 8) {
      u64 v = 0;
      for (int i = 0; i < 8; ++i) v |= static_cast<u64>(stream[off + i]) << (8 * i);
      if (excess == 0 || v <= last_ok) out.push_back(v % q);
    }
    if (out.size() == ctx.n) return ModVector(std::move(out), q);
    len *= 2;  // the XOF output is prefix-stable
  }
}

int round_bit(u64 x, u64 q) {
  if (x >= q) throw Error(Errc::kModulus, "round_bit: value out of range");
  const u64 half = q / 2;
  const u64 d0 = std::min(x, q - x);
  const u64 diff = x > half ? x - half : half - x;
  const u64 dh = std::min(diff, q - diff);
  return d0 < dh ? 0 : 1;
}

std::vector<int> round_vec(const ModVector& v) {
  std::vector<int> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = round_bit(v[i], v.q());
  return out;
}

}  // namespace ahibet
