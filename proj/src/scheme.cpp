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

#include "ahibet/scheme.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "ahibet/errors.hpp"
#include "ahibet/gaussian.hpp"

namespace ahibet {

namespace {

ModMatrix uniform_matrix(std::size_t rows, std::size_t cols, u64 q, RandomSource& rng) {
  std::vector<u64> data(rows * cols);
  for (auto& v : data) v = rng.uniform_below(q);
  return ModMatrix(rows, cols, q, std::move(data));
}

// Gaussian trapdoor whose spectral norm stays within the estimate the
// parameters were derived from; redrawn otherwise.
IntMatrix trapdoor_matrix(const ParamSet& p, RandomSource& rng) {
  const double limit = trapdoor_s1_estimate(p.n, p.m, p.omega);
  for (int attempt = 0; attempt < 64; ++attempt) {
    IntMatrix r = sample_z_matrix(p.m, p.omega, trapdoor_width(p.n), rng);
    if (s1_upper(r) <= limit) return r;
  }
  throw Error(Errc::kBudget, "setup: trapdoor norm estimate keeps failing");
}

IntVector noise_vector(std::size_t len, double width, bool zero, RandomSource& rng) {
  IntVector out(len, 0);
  if (zero) return out;
  const GaussianParam gp{width, 0.0, kTailcut};
  for (auto& v : out) v = sample_z(gp, rng);
  return out;
}

ModVector add(const ModVector& a, const IntVector& e) {
  ModVector out(a.size(), a.q());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, add_mod(a[i], reduce_signed(e[i], a.q()), a.q()));
  return out;
}

ModVector add(const ModVector& a, const ModVector& b) {
  ModVector out(a.size(), a.q());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, add_mod(a[i], b[i], a.q()));
  return out;
}

ModVector sub(const ModVector& a, const ModVector& b) {
  ModVector out(a.size(), a.q());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, sub_mod(a[i], b[i], a.q()));
  return out;
}

ModVector concat(const ModVector& a, const ModVector& b) {
  std::vector<u64> v(a.values().begin(), a.values().end());
  v.insert(v.end(), b.values().begin(), b.values().end());
  return ModVector(std::move(v), a.q());
}

// bits * floor(q/2)
ModVector encode_bits(const std::vector<int>& bits, u64 q) {
  ModVector out(bits.size(), q);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) throw Error(Errc::kPrecondition, "message bits must be 0 or 1");
    out.set(i, bits[i] ? q / 2 : 0);
  }
  return out;
}

}  // namespace

Scheme::Scheme(ParamSet params) : params_(std::move(params)) {
  validate(params_);
  frd_ = find_irreducible(params_.n, params_.q);
  g_ = gadget_matrix(params_.n, params_.q);
}

IdentityPath Scheme::make_identity(const std::vector<std::vector<u64>>& components) const {
  std::vector<ModVector> c;
  for (const auto& raw : components) {
    if (raw.size() != params_.n) throw Error(Errc::kDimension, "identity component must have n entries");
    std::vector<u64> v(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) v[i] = raw[i] % params_.q;
    c.emplace_back(std::move(v), params_.q);
  }
  IdentityPath id(std::move(c));
  check_identity(id);
  return id;
}

void Scheme::check_identity(const IdentityPath& id) const {
  if (id.n() != params_.n || id.q() != params_.q) {
    throw Error(Errc::kDimension, "identity does not match the parameters");
  }
  if (id.depth() > params_.d) {
    throw Error(Errc::kPrecondition, "identity depth " + std::to_string(id.depth()) +
                                         " exceeds the maximum " + std::to_string(params_.d));
  }
}

void Scheme::check(const MasterPublicKey& mpk) const {
  const ParamSet& p = params_;
  auto shape = [&](const ModMatrix& x, std::size_t r, std::size_t c, const char* what) {
    if (x.rows() != r || x.cols() != c || x.q() != p.q) {
      throw Error(Errc::kDimension, std::string("public key: bad shape of ") + what);
    }
  };
  shape(mpk.a, p.n, p.m, "A");
  if (mpk.ai.size() != p.d + 1) throw Error(Errc::kDimension, "public key: need A_0 .. A_d");
  for (const ModMatrix& x : mpk.ai) shape(x, p.n, p.omega, "A_i");
  shape(mpk.u1, p.n, p.lambda, "U_1");
  shape(mpk.u2, p.n, p.lambda, "U_2");
}

void Scheme::check(const MasterSecretKey& msk) const {
  for (const IntMatrix* r : {&msk.r0, &msk.r1}) {
    if (r->rows() != params_.m || r->cols() != params_.omega) {
      throw Error(Errc::kDimension, "master secret key: bad trapdoor shape");
    }
  }
}

void Scheme::check(const Ciphertext& ct) const {
  const ParamSet& p = params_;
  auto len = [&](const ModVector& v, std::size_t want, const char* what) {
    if (v.size() != want || v.q() != p.q) {
      throw Error(Errc::kDimension, std::string("ciphertext: bad length of ") + what);
    }
  };
  if (ct.depth == 0 || ct.depth > p.d) throw Error(Errc::kDimension, "ciphertext: bad depth");
  len(ct.c0, p.m, "c0");
  len(ct.c1, ct.depth * p.omega, "c1");
  len(ct.c2, p.lambda, "c2");
  len(ct.c3, p.lambda, "c3");
  len(ct.c4, p.omega, "c4");
  if (ct.k.size() != p.lambda) throw Error(Errc::kDimension, "ciphertext: bad tag length");
  for (int b : ct.k) {
    if (b != 0 && b != 1) throw Error(Errc::kDimension, "ciphertext: tag bits must be 0 or 1");
  }
}

std::pair<MasterPublicKey, MasterSecretKey> Scheme::setup(RandomSource& rng) const {
  const ParamSet& p = params_;
  MasterPublicKey mpk;
  MasterSecretKey msk;
  mpk.a = uniform_matrix(p.n, p.m, p.q, rng);
  msk.r0 = trapdoor_matrix(p, rng);
  msk.r1 = trapdoor_matrix(p, rng);
  mpk.ai.push_back(mixed_mul_mod(mpk.a, msk.r0));
  mpk.ai.push_back(mixed_mul_mod(mpk.a, msk.r1));
  for (std::size_t i = 2; i <= p.d; ++i) mpk.ai.push_back(uniform_matrix(p.n, p.omega, p.q, rng));
  mpk.u1 = uniform_matrix(p.n, p.lambda, p.q, rng);
  mpk.u2 = uniform_matrix(p.n, p.lambda, p.q, rng);
  return {std::move(mpk), std::move(msk)};
}

ModMatrix Scheme::tagged_block(const ModMatrix& a_block, const ModVector& u) const {
  return add_mod(a_block, mat_mul_mod(frd(frd_, u), g_));
}

ModMatrix Scheme::build_f(const MasterPublicKey& mpk, const IdentityPath& id) const {
  check(mpk);
  check_identity(id);
  ModMatrix f = mpk.a;
  for (std::size_t i = 0; i < id.depth(); ++i) {
    f = hconcat(f, tagged_block(mpk.ai[i + 1], id.component(i)));
  }
  return f;
}

ModMatrix Scheme::build_f_trace(const MasterPublicKey& mpk, const IdentityPath& id) const {
  check(mpk);
  check_identity(id);
  return hconcat(mpk.a, tagged_block(mpk.ai[0], hash_to_zqn(frd_, id)));
}

SecretKey Scheme::extract(const MasterPublicKey& mpk, const MasterSecretKey& msk,
                          const IdentityPath& id, RandomSource& rng) const {
  check(mpk);
  check(msk);
  check_identity(id);
  if (id.depth() != 1) throw Error(Errc::kPrecondition, "extract takes a depth-1 identity");
  const GadgetTrapdoor t = make_trapdoor(mpk.a, msk.r1, frd(frd_, id.component(0)));
  ShortBasis basis = sample_basis_right(t, params_.sigma_at(1), rng);
  return SecretKey{id, std::move(basis)};
}

SecretKey Scheme::derive(const MasterPublicKey& mpk, const SecretKey& parent,
                         const IdentityPath& child, RandomSource& rng) const {
  check_identity(child);
  const std::size_t l = child.depth();
  if (l != parent.id.depth() + 1 || !parent.id.is_prefix_of(child)) {
    throw Error(Errc::kPrecondition, "derive: child must extend the parent by one component");
  }
  const ModMatrix f_parent = build_f(mpk, parent.id);
  if (parent.basis.for_matrix() != f_parent) {
    throw Error(Errc::kInconsistent, "derive: parent key does not belong to this public key");
  }
  const ModMatrix ext = tagged_block(mpk.ai[l], child.component(l - 1));
  ShortBasis basis = sample_basis_left(f_parent, ext, parent.basis, params_.sigma_at(l), rng);
  return SecretKey{child, std::move(basis)};
}

TracingKey Scheme::tsk_gen(const MasterPublicKey& mpk, const MasterSecretKey& msk,
                           const IdentityPath& id, RandomSource& rng) const {
  check(mpk);
  check(msk);
  check_identity(id);
  const ModVector h = hash_to_zqn(frd_, id);
  const GadgetTrapdoor t = make_trapdoor(mpk.a, msk.r0, frd(frd_, h));
  IntMatrix d = sample_right(t, mpk.u2, params_.sigma_at(1), rng);
  return TracingKey{id, std::move(d)};
}

Ciphertext Scheme::encrypt(const MasterPublicKey& mpk, const IdentityPath& id,
                           const std::vector<int>& message, RandomSource& rng,
                           const EncryptOptions& options) const {
  const ParamSet& p = params_;
  if (message.size() != p.lambda) {
    throw Error(Errc::kPrecondition, "message must have exactly lambda bits");
  }
  const ModMatrix f = build_f(mpk, id);
  const std::size_t l = id.depth();
  Ciphertext ct;
  ct.depth = l;
  if (options.tag) {
    if (options.tag->size() != p.lambda) throw Error(Errc::kPrecondition, "tag must have lambda bits");
    ct.k = *options.tag;
  } else {
    ct.k.resize(p.lambda);
    for (auto& b : ct.k) b = static_cast<int>(rng.uniform_below(2));
  }
  std::vector<u64> sv(p.n);
  for (auto& v : sv) v = rng.uniform_below(p.q);
  const ModVector s(std::move(sv), p.q);
  const double wide = 2.0 * p.r * p.tau;
  const bool z = options.zero_noise;
  IntVector e0 = noise_vector(p.m, p.r, z, rng);
  IntVector e1 = noise_vector(l * p.omega, wide, z, rng);
  IntVector e2 = noise_vector(p.lambda, p.r, z, rng);
  IntVector e3 = noise_vector(p.lambda, wide, z, rng);
  IntVector e4 = noise_vector(p.omega, wide, z, rng);

  const ModVector sf = vec_mat_mod(s, f);
  std::vector<u64> c0(sf.values().begin(), sf.values().begin() + p.m);
  std::vector<u64> c1(sf.values().begin() + p.m, sf.values().end());
  ct.c0 = add(ModVector(std::move(c0), p.q), e0);
  ct.c1 = add(ModVector(std::move(c1), p.q), e1);
  ct.c2 = add(add(vec_mat_mod(s, mpk.u1), e2), encode_bits(message, p.q));
  ct.c3 = add(add(vec_mat_mod(s, mpk.u2), e3), encode_bits(ct.k, p.q));
  const ModMatrix trace_block = tagged_block(mpk.ai[0], hash_to_zqn(frd_, id));
  ct.c4 = add(vec_mat_mod(s, trace_block), e4);
  if (options.witness != nullptr) {
    *options.witness = EncryptWitness{s, std::move(e0), std::move(e1), std::move(e2),
                                      std::move(e3), std::move(e4)};
  }
  return ct;
}

DecryptResult Scheme::decrypt(const MasterPublicKey& mpk, const Ciphertext& ct,
                              const SecretKey& sk) const {
  DecryptResult out;
  try {
    check(ct);
    check(mpk);
  } catch (const Error&) {
    out.status = DecryptStatus::kParse;
    return out;
  }
  if (ct.depth != sk.id.depth()) {
    out.status = DecryptStatus::kParse;
    return out;
  }
  const ModMatrix f = build_f(mpk, sk.id);
  LweSolution sol;
  try {
    sol = invert_lwe(f, sk.basis, concat(ct.c0, ct.c1));
  } catch (const Error&) {
    out.status = DecryptStatus::kInversion;
    return out;
  }
  out.noise_inf = sol.noise_inf;
  const std::vector<int> k = round_vec(sub(ct.c3, vec_mat_mod(sol.s, mpk.u2)));
  if (k != ct.k) {
    out.status = DecryptStatus::kTagMismatch;
    return out;
  }
  out.message = round_vec(sub(ct.c2, vec_mat_mod(sol.s, mpk.u1)));
  out.status = DecryptStatus::kOk;
  return out;
}

bool Scheme::tk_ver(const MasterPublicKey& mpk, const IdentityPath& id,
                    const TracingKey& tsk, const Ciphertext& ct) const {
  check(mpk);
  check(ct);
  if (!(tsk.id == id)) throw Error(Errc::kPrecondition, "tk_ver: tracing key belongs to another identity");
  if (tsk.d.rows() != params_.m + params_.omega || tsk.d.cols() != params_.lambda) {
    throw Error(Errc::kDimension, "tracing key: bad shape");
  }
  const ModVector y = concat(ct.c0, ct.c4);
  const ModMatrix row(1, y.size(), params_.q, std::vector<u64>(y.values().begin(), y.values().end()));
  const ModMatrix yd = mixed_mul_mod(row, tsk.d);
  ModVector diff(params_.lambda, params_.q);
  for (std::size_t i = 0; i < params_.lambda; ++i) {
    diff.set(i, sub_mod(ct.c3[i], yd.at(0, i), params_.q));
  }
  return round_vec(diff) == ct.k;
}

}  // namespace ahibet
