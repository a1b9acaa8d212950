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

#include <filesystem>
#include <functional>
#include <limits>

#include "ahibet/errors.hpp"
#include "ahibet/serialize.hpp"
#include "oracles.hpp"

namespace ahibet {
namespace {

using io::Json;

RandomSource rng_for(std::uint8_t tag) {
  RandomSource::Seed seed{};
  seed[0] = 0x6e;
  seed[1] = tag;
  return RandomSource(seed);
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return Errc::kParse;
}

std::vector<std::uint8_t> bytes(std::string_view s) { return {s.begin(), s.end()}; }

TEST(Base64, KnownAnswers) {
  // RFC 4648 test vectors.
  const std::pair<const char*, const char*> cases[] = {
      {"", ""}, {"f", "Zg=="}, {"fo", "Zm8="}, {"foo", "Zm9v"},
      {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="}, {"foobar", "Zm9vYmFy"}};
  for (auto [plain, coded] : cases) {
    EXPECT_EQ(io::base64_encode(bytes(plain)), coded);
    EXPECT_EQ(io::base64_decode(coded), bytes(plain));
  }
  EXPECT_THROW(io::base64_decode("Zm9"), Error);
  EXPECT_THROW(io::base64_decode("Zm9v!A=="), Error);
}

TEST(Matrices, LayoutAndRoundTrip) {
  const Json one = io::to_json(ModMatrix(1, 1, 7, {1}));
  EXPECT_EQ(one.dump(), R"({"rows":1,"cols":1,"q":7,"data":"AQAAAAAAAAA="})");
  EXPECT_TRUE(io::to_json(IntMatrix(1, 1, {-1}))["q"].is_null());
  EXPECT_EQ(io::to_json(IntMatrix(1, 1, {-1}))["data"], "//////////8=");

  RandomSource rng = rng_for(1);
  const u64 q = 6542055505981;
  ModMatrix a(3, 5, q);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 5; ++j) a.set(i, j, rng.uniform_below(q));
  }
  EXPECT_EQ(io::mod_matrix_from_json(io::to_json(a)), a);
  const IntMatrix r(2, 2, {std::numeric_limits<i64>::min(), -3, 0, std::numeric_limits<i64>::max()});
  EXPECT_EQ(io::int_matrix_from_json(io::to_json(r)), r);
  const ModVector v({0, 1, q - 1}, q);
  EXPECT_EQ(io::mod_vector_from_json(io::to_json(v)), v);

  Json bad = io::to_json(a);
  bad["data"] = io::base64_encode(std::vector<std::uint8_t>(8 * 15, 0xff));
  EXPECT_NE(code_of([&] { (void)io::mod_matrix_from_json(bad); }), Errc::kOverflow);
  bad = io::to_json(a);
  bad["rows"] = 4;
  EXPECT_EQ(code_of([&] { (void)io::mod_matrix_from_json(bad); }), Errc::kParse);
  EXPECT_EQ(code_of([&] { (void)io::mod_matrix_from_json(Json::parse("[1,2]")); }), Errc::kParse);
}

TEST(Params, RoundTripAndDigest) {
  const ParamSet p = derive_params(16, 2, "toy-small");
  EXPECT_EQ(io::params_from_json(io::to_json(p)), p);
  EXPECT_EQ(io::params_digest(p), io::params_digest(io::params_from_json(io::to_json(p))));
  EXPECT_EQ(io::params_digest(p).size(), 64u);
  EXPECT_NE(io::params_digest(p), io::params_digest(derive_params(16, 3, "toy-small")));
}

TEST(Envelope, KindVersionAndDigest) {
  const ParamSet p = derive_params(8, 1, "toy-small");
  const ParamSet other = derive_params(8, 2, "toy-small");
  const Json e = io::envelope("ct", p, Json{{"x", 1}});
  EXPECT_EQ(io::envelope_kind(e), "ct");
  EXPECT_EQ(io::open_envelope(e, "ct", p)["x"], 1);
  EXPECT_EQ(code_of([&] { (void)io::open_envelope(e, "sk", p); }), Errc::kParse);
  EXPECT_EQ(code_of([&] { (void)io::open_envelope(e, "ct", other); }), Errc::kInconsistent);
  Json v2 = e;
  v2["version"] = io::kFormatVersion + 1;
  EXPECT_EQ(code_of([&] { (void)io::open_envelope(v2, "ct", p); }), Errc::kParse);
}

class KeyFiles : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    scheme_ = new Scheme(derive_params(8, 1, "toy-small"));
    RandomSource rng = rng_for(2);
    auto [mpk, msk] = scheme_->setup(rng);
    mpk_ = new MasterPublicKey(std::move(mpk));
    msk_ = new MasterSecretKey(std::move(msk));
    sk_ = new SecretKey(scheme_->extract(*mpk_, *msk_, scheme_->make_identity({{9, 8, 7, 6}}), rng));
  }
  static void TearDownTestSuite() {
    delete sk_;
    delete msk_;
    delete mpk_;
    delete scheme_;
  }
  static Scheme* scheme_;
  static MasterPublicKey* mpk_;
  static MasterSecretKey* msk_;
  static SecretKey* sk_;
};

Scheme* KeyFiles::scheme_ = nullptr;
MasterPublicKey* KeyFiles::mpk_ = nullptr;
MasterSecretKey* KeyFiles::msk_ = nullptr;
SecretKey* KeyFiles::sk_ = nullptr;

TEST_F(KeyFiles, MasterKeysRoundTrip) {
  const Json j = io::to_json(*mpk_);
  const MasterPublicKey back = io::mpk_from_json(Json::parse(j.dump()), *scheme_);
  EXPECT_EQ(back.a, mpk_->a);
  EXPECT_EQ(back.ai, mpk_->ai);
  EXPECT_EQ(back.u1, mpk_->u1);
  EXPECT_EQ(back.u2, mpk_->u2);
  EXPECT_EQ(io::to_json(back).dump(), j.dump());
  const MasterSecretKey msk = io::msk_from_json(io::to_json(*msk_), *scheme_);
  EXPECT_EQ(msk.r0, msk_->r0);
  EXPECT_EQ(msk.r1, msk_->r1);
}

TEST_F(KeyFiles, SecretKeyRestoresTheSameSampler) {
  ASSERT_TRUE(sk_->basis.has_completion());
  const Json j = Json::parse(io::to_json(*sk_).dump());
  const SecretKey back = io::sk_from_json(j, *scheme_, *mpk_);
  EXPECT_EQ(back.id, sk_->id);
  EXPECT_EQ(back.basis.b(), sk_->basis.b());
  EXPECT_TRUE(back.basis.has_completion());
  EXPECT_EQ(back.basis.gs_norm(), sk_->basis.gs_norm());
  EXPECT_EQ(io::to_json(back).dump(), j.dump());
  // Same seed, same lattice sample.
  const std::vector<double> center(back.basis.dim(), 0.5);
  const double sigma = 2 * back.basis.gs_norm() * gs_slack(static_cast<double>(back.basis.dim()));
  RandomSource r1 = rng_for(3), r2 = rng_for(3);
  EXPECT_EQ(sample_lattice(back.basis, sigma, center, r1), sample_lattice(sk_->basis, sigma, center, r2));

  RandomSource rng = rng_for(4);
  const std::vector<int> msg(8, 1);
  const DecryptResult r = scheme_->decrypt(*mpk_, scheme_->encrypt(*mpk_, back.id, msg, rng), back);
  EXPECT_EQ(r.message, msg);
}

TEST_F(KeyFiles, SecretKeyTamperingIsDetected) {
  const Json good = io::to_json(*sk_);
  Json j = good;
  j["basis"]["completion"]["denom"] = "3";
  EXPECT_THROW((void)io::sk_from_json(j, *scheme_, *mpk_), Error);
  j = good;
  j["id"] = io::to_json(scheme_->make_identity({{1, 1, 1, 1}}));
  EXPECT_THROW((void)io::sk_from_json(j, *scheme_, *mpk_), Error);
  j = good;
  j["basis"].erase("completion");
  EXPECT_EQ(code_of([&] { (void)io::sk_from_json(j, *scheme_, *mpk_); }), Errc::kParse);
}

TEST_F(KeyFiles, TracingKeysAndCiphertexts) {
  RandomSource rng = rng_for(5);
  const IdentityPath id = scheme_->make_identity({{9, 8, 7, 6}});
  const TracingKey tsk = scheme_->tsk_gen(*mpk_, *msk_, id, rng);
  const TracingKey tback = io::tsk_from_json(io::to_json(tsk), *scheme_);
  EXPECT_EQ(tback.id, tsk.id);
  EXPECT_EQ(tback.d, tsk.d);

  const Ciphertext ct = scheme_->encrypt(*mpk_, id, std::vector<int>(8, 0), rng);
  const Json cj = io::to_json(ct);
  EXPECT_FALSE(cj.contains("id"));
  const Ciphertext back = io::ct_from_json(Json::parse(cj.dump()), *scheme_);
  EXPECT_EQ(back.depth, ct.depth);
  EXPECT_EQ(back.c0, ct.c0);
  EXPECT_EQ(back.c4, ct.c4);
  EXPECT_EQ(back.k, ct.k);
  EXPECT_TRUE(scheme_->tk_ver(*mpk_, id, tback, back));
}

TEST(Files, WriteReadIsByteStable) {
  const auto dir = std::filesystem::temp_directory_path() / "ahibet_serialize_test";
  std::filesystem::create_directories(dir);
  const Json j = io::envelope("x", derive_params(8, 1, "toy-small"), Json{{"b", 2}, {"a", 1}});
  io::write_json(dir / "a.json", j);
  const Json back = io::read_json(dir / "a.json");
  EXPECT_EQ(back.dump(), j.dump());
  EXPECT_EQ(code_of([&] { (void)io::read_json(dir / "missing.json"); }), Errc::kParse);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace ahibet
