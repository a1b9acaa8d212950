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

#ifndef AHIBET_SCHEME_HPP_
#define AHIBET_SCHEME_HPP_

#include <optional>
#include <utility>
#include <vector>

#include "ahibet/identity.hpp"
#include "ahibet/matrix.hpp"
#include "ahibet/params.hpp"
#include "ahibet/random.hpp"
#include "ahibet/trapdoor.hpp"

namespace ahibet {

struct MasterPublicKey {
  ModMatrix a;                // n x m
  std::vector<ModMatrix> ai;  // A_0 .. A_d, each n x omega
  ModMatrix u1, u2;           // n x lambda
};

struct MasterSecretKey {
  IntMatrix r0, r1;  // m x omega
};

struct SecretKey {
  IdentityPath id;
  ShortBasis basis;
};

struct TracingKey {
  IdentityPath id;
  IntMatrix d;  // (m + omega) x lambda
};

// The tag k travels in the clear; the ciphertext does not name its
// recipient.
struct Ciphertext {
  std::size_t depth = 0;
  ModVector c0, c1, c2, c3, c4;
  std::vector<int> k;
};

// Secret randomness of one encryption, for tests.
struct EncryptWitness {
  ModVector s;
  IntVector e0, e1, e2, e3, e4;
};

// Test hooks for encrypt.
struct EncryptOptions {
  bool zero_noise = false;
  std::optional<std::vector<int>> tag;
  EncryptWitness* witness = nullptr;
};

enum class DecryptStatus { kOk, kParse, kInversion, kTagMismatch };

// The public outcome is message-or-reject; the status and the inversion
// noise are diagnostics.
struct DecryptResult {
  std::optional<std::vector<int>> message;
  DecryptStatus status = DecryptStatus::kParse;
  i64 noise_inf = -1;  // |[e_0 | e_1]^T T|_inf when inversion ran
};

class Scheme {
 public:
  // Validates the parameters and fixes the FRD modulus polynomial.
  explicit Scheme(ParamSet params);

  const ParamSet& params() const { return params_; }
  const FrdContext& frd_context() const { return frd_; }

  // Identity component from raw coordinates (reduced mod q).
  IdentityPath make_identity(const std::vector<std::vector<u64>>& components) const;

  std::pair<MasterPublicKey, MasterSecretKey> setup(RandomSource& rng) const;

  // [A | A_1 + FRD(id_1) G | ... | A_l + FRD(id_l) G]
  ModMatrix build_f(const MasterPublicKey& mpk, const IdentityPath& id) const;
  // [A | A_0 + FRD(H(id)) G]
  ModMatrix build_f_trace(const MasterPublicKey& mpk, const IdentityPath& id) const;

  SecretKey extract(const MasterPublicKey& mpk, const MasterSecretKey& msk,
                    const IdentityPath& id, RandomSource& rng) const;
  SecretKey derive(const MasterPublicKey& mpk, const SecretKey& parent,
                   const IdentityPath& child, RandomSource& rng) const;
  TracingKey tsk_gen(const MasterPublicKey& mpk, const MasterSecretKey& msk,
                     const IdentityPath& id, RandomSource& rng) const;

  Ciphertext encrypt(const MasterPublicKey& mpk, const IdentityPath& id,
                     const std::vector<int>& message, RandomSource& rng,
                     const EncryptOptions& options = {}) const;
  DecryptResult decrypt(const MasterPublicKey& mpk, const Ciphertext& ct,
                        const SecretKey& sk) const;
  bool tk_ver(const MasterPublicKey& mpk, const IdentityPath& id,
              const TracingKey& tsk, const Ciphertext& ct) const;

  // Shape checks against the parameters; throw Errc::kDimension.
  void check(const MasterPublicKey& mpk) const;
  void check(const MasterSecretKey& msk) const;
  void check(const Ciphertext& ct) const;

 private:
  void check_identity(const IdentityPath& id) const;
  ModMatrix tagged_block(const ModMatrix& a_block, const ModVector& u) const;

  ParamSet params_;
  FrdContext frd_;
  ModMatrix g_;
};

}  // namespace ahibet

#endif  // AHIBET_SCHEME_HPP_
