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

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "ahibet/errors.hpp"
#include "ahibet/scheme.hpp"
#include "oracles.hpp"

namespace ahibet {
namespace {

RandomSource rng_for(std::uint8_t tag) {
  RandomSource::Seed seed{};
  seed[0] = 0x5c;
  seed[1] = tag;
  return RandomSource(seed);
}

// s^T M with 128-bit accumulation.
ModVector row_times(const ModVector& s, const ModMatrix& m) {
  std::vector<u64> out(m.cols(), 0);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    unsigned __int128 acc = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) acc = (acc + static_cast<unsigned __int128>(s[i]) * m.at(i, j)) % m.q();
    out[j] = static_cast<u64>(acc);
  }
  return ModVector(out, m.q());
}

u64 plus(u64 a, i64 e, u64 q) {
  const i64 r = static_cast<i64>(static_cast<__int128>(e) % static_cast<__int128>(q));
  return (a + static_cast<u64>(r < 0 ? r + static_cast<i64>(q) : r)) % q;
}

double column_norm(const IntMatrix& x, std::size_t j) {
  double s = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) s += static_cast<double>(x.at(i, j)) * x.at(i, j);
  return std::sqrt(s);
}

std::vector<int> bits(std::size_t n, RandomSource& rng) {
  std::vector<int> out(n);
  for (int& b : out) b = static_cast<int>(rng.uniform_below(2));
  return out;
}

class SchemeTest : public ::testing::Test {
 protected:
  struct World {
    std::unique_ptr<Scheme> scheme;
    MasterPublicKey mpk;
    MasterSecretKey msk;
    IdentityPath alice{{ModVector({1, 2, 3, 4}, 5)}};
    IdentityPath alice_bob{{ModVector({1, 2, 3, 4}, 5)}};
    std::unique_ptr<SecretKey> sk1, sk2;
  };
  static World* w;

  static void SetUpTestSuite() {
    w = new World;
    w->scheme = std::make_unique<Scheme>(derive_params(16, 2, "toy-small"));
    RandomSource rng = rng_for(1);
    std::tie(w->mpk, w->msk) = w->scheme->setup(rng);
    w->alice = w->scheme->make_identity({{1, 2, 3, 4}});
    w->alice_bob = w->scheme->make_identity({{1, 2, 3, 4}, {5, 6, 7, 8}});
    w->sk1 = std::make_unique<SecretKey>(w->scheme->extract(w->mpk, w->msk, w->alice, rng));
    w->sk2 = std::make_unique<SecretKey>(w->scheme->derive(w->mpk, *w->sk1, w->alice_bob, rng));
  }
  static void TearDownTestSuite() {
    delete w;
    w = nullptr;
  }

  const Scheme& s() const { return *w->scheme; }
  const ParamSet& p() const { return w->scheme->params(); }
};

SchemeTest::World* SchemeTest::w = nullptr;

TEST_F(SchemeTest, SetupShapesAndTrapdoorRelations) {
  EXPECT_NO_THROW(s().check(w->mpk));
  EXPECT_NO_THROW(s().check(w->msk));
  ASSERT_EQ(w->mpk.ai.size(), p().d + 1);
  EXPECT_EQ(w->mpk.u1.cols(), p().lambda);
  const ModMatrix g = gadget_matrix(p().n, p().q);
  // [A | A_1 + H G] [-R_1; I] == H G and likewise for A_0 and R_0.
  const ModMatrix f1 = s().build_f(w->mpk, w->alice);
  const ModMatrix h1 = frd(s().frd_context(), w->alice.component(0));
  EXPECT_EQ(oracle::mul_mod(f1, vconcat(negate(w->msk.r1), IntMatrix::identity(p().omega))),
            mat_mul_mod(h1, g));
  const ModMatrix f0 = s().build_f_trace(w->mpk, w->alice);
  const ModMatrix h0 = frd(s().frd_context(), hash_to_zqn(s().frd_context(), w->alice));
  EXPECT_EQ(oracle::mul_mod(f0, vconcat(negate(w->msk.r0), IntMatrix::identity(p().omega))),
            mat_mul_mod(h0, g));
  EXPECT_LT(oracle::singular_max(w->msk.r1), trapdoor_s1_estimate(p().n, p().m, p().omega) * 1.5);
}

TEST_F(SchemeTest, KeysAreShortBasesOfTheIdentityLattice) {
  for (const SecretKey* sk : {w->sk1.get(), w->sk2.get()}) {
    const std::size_t l = sk->id.depth();
    const ModMatrix f = s().build_f(w->mpk, sk->id);
    EXPECT_EQ(sk->basis.for_matrix(), f);
    EXPECT_EQ(sk->basis.dim(), p().width(l));
    EXPECT_TRUE(oracle::is_zero(oracle::mul_mod(f, sk->basis.b())));
    EXPECT_LE(sk->basis.gs_norm(), p().sigma_at(l) * std::sqrt(static_cast<double>(p().width(l))));
    EXPECT_NEAR(sk->basis.log_volume(), p().n * std::log(static_cast<double>(p().q)), 1e-6);
  }
}

TEST_F(SchemeTest, RoundTripAtEveryDepth) {
  RandomSource rng = rng_for(2);
  for (const SecretKey* sk : {w->sk1.get(), w->sk2.get()}) {
    for (int i = 0; i < 5; ++i) {
      const std::vector<int> msg = bits(p().lambda, rng);
      const Ciphertext ct = s().encrypt(w->mpk, sk->id, msg, rng);
      const DecryptResult r = s().decrypt(w->mpk, ct, *sk);
      ASSERT_EQ(r.status, DecryptStatus::kOk);
      EXPECT_EQ(*r.message, msg);
      EXPECT_LT(4 * r.noise_inf, static_cast<i64>(p().q));
    }
  }
}

TEST_F(SchemeTest, CiphertextEquationsFromTheWitness) {
  RandomSource rng = rng_for(3);
  EncryptWitness wit;
  EncryptOptions opt;
  opt.witness = &wit;
  const std::vector<int> msg = bits(p().lambda, rng);
  const Ciphertext ct = s().encrypt(w->mpk, w->alice_bob, msg, rng, opt);
  const u64 q = p().q, half = q / 2;
  const ModVector sf = row_times(wit.s, s().build_f(w->mpk, w->alice_bob));
  for (std::size_t j = 0; j < p().m; ++j) EXPECT_EQ(ct.c0[j], plus(sf[j], wit.e0[j], q));
  for (std::size_t j = 0; j < 2 * p().omega; ++j) EXPECT_EQ(ct.c1[j], plus(sf[p().m + j], wit.e1[j], q));
  const ModVector su1 = row_times(wit.s, w->mpk.u1), su2 = row_times(wit.s, w->mpk.u2);
  for (std::size_t j = 0; j < p().lambda; ++j) {
    EXPECT_EQ(ct.c2[j], plus((su1[j] + msg[j] * half) % q, wit.e2[j], q));
    EXPECT_EQ(ct.c3[j], plus((su2[j] + ct.k[j] * half) % q, wit.e3[j], q));
  }
  const ModVector st = row_times(wit.s, s().build_f_trace(w->mpk, w->alice_bob).columns(p().m, p().omega));
  for (std::size_t j = 0; j < p().omega; ++j) EXPECT_EQ(ct.c4[j], plus(st[j], wit.e4[j], q));
}

TEST_F(SchemeTest, ZeroNoiseAndFixedTag) {
  RandomSource rng = rng_for(4);
  EncryptOptions opt;
  opt.zero_noise = true;
  opt.tag = std::vector<int>(p().lambda, 1);
  const Ciphertext ct = s().encrypt(w->mpk, w->alice, std::vector<int>(p().lambda, 0), rng, opt);
  EXPECT_EQ(ct.k, *opt.tag);
  const DecryptResult r = s().decrypt(w->mpk, ct, *w->sk1);
  EXPECT_EQ(r.status, DecryptStatus::kOk);
  EXPECT_EQ(r.noise_inf, 0);
}

TEST_F(SchemeTest, RejectsForeignCiphertexts) {
  RandomSource rng = rng_for(5);
  const std::vector<int> msg = bits(p().lambda, rng);
  const IdentityPath carol = s().make_identity({{4, 3, 2, 1}});
  const Ciphertext other = s().encrypt(w->mpk, carol, msg, rng);
  const DecryptResult r = s().decrypt(w->mpk, other, *w->sk1);
  EXPECT_FALSE(r.message.has_value());
  EXPECT_NE(r.status, DecryptStatus::kOk);
  // Depth mismatch is a parse-level rejection.
  EXPECT_EQ(s().decrypt(w->mpk, s().encrypt(w->mpk, w->alice, msg, rng), *w->sk2).status,
            DecryptStatus::kParse);
  // Tampered tag.
  Ciphertext ct = s().encrypt(w->mpk, w->alice, msg, rng);
  ct.k[0] ^= 1;
  EXPECT_EQ(s().decrypt(w->mpk, ct, *w->sk1).status, DecryptStatus::kTagMismatch);
  EXPECT_THROW(s().encrypt(w->mpk, w->alice, std::vector<int>(p().lambda + 1, 0), rng), Error);
}

TEST_F(SchemeTest, DeriveRequiresAPrefixAndTheMatchingKey) {
  RandomSource rng = rng_for(6);
  const IdentityPath stranger = s().make_identity({{4, 3, 2, 1}, {1, 1, 1, 1}});
  EXPECT_THROW(s().derive(w->mpk, *w->sk1, stranger, rng), Error);
  EXPECT_THROW(s().derive(w->mpk, *w->sk1, w->alice, rng), Error);
  SecretKey forged{s().make_identity({{4, 3, 2, 1}}), w->sk1->basis};
  EXPECT_THROW(s().derive(w->mpk, forged, s().make_identity({{4, 3, 2, 1}, {1, 1, 1, 1}}), rng), Error);
  EXPECT_THROW(s().make_identity({{1, 2, 3}}), Error);
  EXPECT_THROW(s().make_identity({{0, 0, 0, 0}}), Error);
  EXPECT_THROW(s().make_identity({{1, 2, 3, 4}, {1, 2, 3, 4}, {1, 2, 3, 4}}), Error);
}

TEST_F(SchemeTest, TracingKeys) {
  RandomSource rng = rng_for(7);
  const TracingKey tsk = s().tsk_gen(w->mpk, w->msk, w->alice_bob, rng);
  const ModMatrix ft = s().build_f_trace(w->mpk, w->alice_bob);
  EXPECT_EQ(oracle::mul_mod(ft, tsk.d), w->mpk.u2);
  for (std::size_t j = 0; j < tsk.d.cols(); ++j) {
    EXPECT_LE(column_norm(tsk.d, j), p().sigma_at(1) * std::sqrt(static_cast<double>(p().m + p().omega)));
  }
  const std::vector<int> msg = bits(p().lambda, rng);
  EXPECT_TRUE(s().tk_ver(w->mpk, w->alice_bob, tsk, s().encrypt(w->mpk, w->alice_bob, msg, rng)));
  const IdentityPath sibling = s().make_identity({{1, 2, 3, 4}, {5, 6, 7, 9}});
  EXPECT_FALSE(s().tk_ver(w->mpk, w->alice_bob, tsk, s().encrypt(w->mpk, sibling, msg, rng)));
  EXPECT_FALSE(s().tk_ver(w->mpk, w->alice_bob, tsk, s().encrypt(w->mpk, w->alice, msg, rng)));
  EXPECT_THROW(s().tk_ver(w->mpk, sibling, tsk, s().encrypt(w->mpk, sibling, msg, rng)), Error);
}

TEST_F(SchemeTest, MasterKeyInvariants) {
  EXPECT_EQ(w->mpk.ai[0], oracle::mul_mod(w->mpk.a, w->msk.r0));
  EXPECT_EQ(w->mpk.ai[1], oracle::mul_mod(w->mpk.a, w->msk.r1));
  // Fresh blocks pass a uniformity test entrywise (bucketed by q / 64).
  std::vector<std::uint64_t> counts(64, 0);
  for (std::size_t b = 0; b < w->mpk.ai.size(); ++b) {
    for (u64 v : w->mpk.ai[b].data()) ++counts[static_cast<std::size_t>((static_cast<unsigned __int128>(v) * 64) / p().q)];
  }
  EXPECT_GT(oracle::chi_square_uniform(counts).p_value, 1e-4);
}

TEST_F(SchemeTest, NoiselessIdentityAndFreshRandomness) {
  RandomSource rng = rng_for(8);
  EncryptWitness wit;
  EncryptOptions opt;
  opt.zero_noise = true;
  opt.tag = std::vector<int>(p().lambda, 0);
  opt.witness = &wit;
  const std::vector<int> msg = bits(p().lambda, rng);
  const Ciphertext ct = s().encrypt(w->mpk, w->alice, msg, rng, opt);
  const ModVector su1 = row_times(wit.s, w->mpk.u1);
  for (std::size_t j = 0; j < p().lambda; ++j) {
    EXPECT_EQ((ct.c2[j] + p().q - su1[j]) % p().q, static_cast<u64>(msg[j]) * (p().q / 2));
  }
  // Two honest encryptions of the same message differ everywhere.
  const Ciphertext a = s().encrypt(w->mpk, w->alice, msg, rng), b = s().encrypt(w->mpk, w->alice, msg, rng);
  EXPECT_NE(a.c0, b.c0);
  EXPECT_NE(a.c1, b.c1);
  EXPECT_NE(a.c2, b.c2);
  EXPECT_NE(a.c3, b.c3);
  EXPECT_NE(a.c4, b.c4);
}

TEST_F(SchemeTest, TracingDoesNotDescendTheHierarchy) {
  RandomSource rng = rng_for(9);
  const TracingKey parent = s().tsk_gen(w->mpk, w->msk, w->alice, rng);
  const TracingKey child = s().tsk_gen(w->mpk, w->msk, w->alice_bob, rng);
  EXPECT_NE(parent.d, child.d);
  const std::vector<int> msg = bits(p().lambda, rng);
  const Ciphertext to_parent = s().encrypt(w->mpk, w->alice, msg, rng);
  const Ciphertext to_child = s().encrypt(w->mpk, w->alice_bob, msg, rng);
  EXPECT_TRUE(s().tk_ver(w->mpk, w->alice, parent, to_parent));
  EXPECT_FALSE(s().tk_ver(w->mpk, w->alice, parent, to_child));
  EXPECT_TRUE(s().tk_ver(w->mpk, w->alice_bob, child, to_child));
  EXPECT_FALSE(s().tk_ver(w->mpk, w->alice_bob, child, to_parent));
  // Flipping one coordinate of c3 by floor(q/2) flips one recovered tag bit.
  Ciphertext tampered = to_child;
  tampered.c3.set(0, (tampered.c3[0] + p().q / 2) % p().q);
  EXPECT_FALSE(s().tk_ver(w->mpk, w->alice_bob, child, tampered));
}

TEST_F(SchemeTest, TracingKeysAreDeterministicInTheSeed) {
  RandomSource a = rng_for(10), b = rng_for(10);
  EXPECT_EQ(s().tsk_gen(w->mpk, w->msk, w->alice, a).d, s().tsk_gen(w->mpk, w->msk, w->alice, b).d);
}

TEST_F(SchemeTest, DepthBound) {
  RandomSource rng = rng_for(11);
  const IdentityPath too_deep = w->alice_bob.child(ModVector({1, 0, 0, 0}, p().q));
  EXPECT_THROW(s().derive(w->mpk, *w->sk2, too_deep, rng), Error);
  EXPECT_THROW(s().encrypt(w->mpk, too_deep, std::vector<int>(p().lambda, 0), rng), Error);
}

TEST(Scheme, RejectsInvalidParameters) {
  ParamSet p = derive_params(8, 1, "toy-small");
  p.q += 2;
  EXPECT_THROW(Scheme{p}, Error);
}

}  // namespace
}  // namespace ahibet
