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

#include "ahibet/serialize.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

#include "ahibet/errors.hpp"
#include "basis_internal.hpp"

namespace ahibet::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(Errc::kParse, what); }

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    parse_error(std::string("bad field '") + key + "'");
  }
}

const Json& sub(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string encode_words(std::span<const u64> words) {
  std::vector<std::uint8_t> bytes(words.size() * 8);
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<std::uint8_t>(words[i] >> (8 * b));
  }
  return base64_encode(bytes);
}

std::vector<u64> decode_words(const std::string& text, std::size_t count) {
  const std::vector<std::uint8_t> bytes = base64_decode(text);
  if (bytes.size() != count * 8) parse_error("matrix data has the wrong length");
  std::vector<u64> words(count);
  for (std::size_t i = 0; i < count; ++i) {
    u64 w = 0;
    for (int b = 0; b < 8; ++b) w |= static_cast<u64>(bytes[i * 8 + b]) << (8 * b);
    words[i] = w;
  }
  return words;
}

std::string to_hex(const mpz_class& v) { return v.get_str(16); }

mpz_class from_hex(const Json& j) {
  if (!j.is_string()) parse_error("expected a hex integer");
  mpz_class v;
  if (v.set_str(j.get<std::string>(), 16) != 0) parse_error("bad hex integer");
  return v;
}

std::string bits_to_string(const std::vector<int>& bits) {
  std::string s;
  for (int b : bits) s.push_back(b ? '1' : '0');
  return s;
}

std::vector<int> bits_from_string(const std::string& s) {
  std::vector<int> bits;
  for (char c : s) {
    if (c != '0' && c != '1') parse_error("bit strings hold only 0 and 1");
    bits.push_back(c == '1');
  }
  return bits;
}

std::pair<std::size_t, std::size_t> shape(const Json& j) {
  return {field<std::size_t>(j, "rows"), field<std::size_t>(j, "cols")};
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int len = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(len));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) parse_error("base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int len = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                  static_cast<int>(text.size()));
  if (len < 0) parse_error("invalid base64");
  // EVP_DecodeBlock keeps the padding bytes.
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(len) - pad);
  return out;
}

Json to_json(const ModMatrix& a) {
  Json j;
  j["rows"] = a.rows();
  j["cols"] = a.cols();
  j["q"] = a.q();
  j["data"] = encode_words(a.data());
  return j;
}

Json to_json(const IntMatrix& a) {
  std::vector<u64> words(a.data().begin(), a.data().end());
  Json j;
  j["rows"] = a.rows();
  j["cols"] = a.cols();
  j["q"] = nullptr;
  j["data"] = encode_words(words);
  return j;
}

Json to_json(const ModVector& v) {
  return to_json(ModMatrix(1, v.size(), v.q(), std::vector<u64>(v.values().begin(), v.values().end())));
}

ModMatrix mod_matrix_from_json(const Json& j) {
  const auto [rows, cols] = shape(j);
  const u64 q = field<u64>(j, "q");
  if (q < 2) parse_error("modulus must be at least 2");
  std::vector<u64> data = decode_words(field<std::string>(j, "data"), rows * cols);
  for (u64 v : data) {
    if (v >= q) parse_error("matrix entry out of range");
  }
  return ModMatrix(rows, cols, q, std::move(data));
}

IntMatrix int_matrix_from_json(const Json& j) {
  const auto [rows, cols] = shape(j);
  if (!sub(j, "q").is_null()) parse_error("signed matrix must have q = null");
  const std::vector<u64> words = decode_words(field<std::string>(j, "data"), rows * cols);
  std::vector<i64> data(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) data[i] = static_cast<i64>(words[i]);
  return IntMatrix(rows, cols, std::move(data));
}

ModVector mod_vector_from_json(const Json& j) {
  const ModMatrix m = mod_matrix_from_json(j);
  if (m.rows() != 1) parse_error("vector must be a single row");
  return ModVector(std::vector<u64>(m.data().begin(), m.data().end()), m.q());
}

Json to_json(const IdentityPath& id) {
  Json comps = Json::array();
  for (const ModVector& c : id.components()) {
    comps.push_back(std::vector<u64>(c.values().begin(), c.values().end()));
  }
  Json j;
  j["components"] = std::move(comps);
  return j;
}

IdentityPath identity_from_json(const Json& j, u64 q) {
  const auto raw = field<std::vector<std::vector<u64>>>(j, "components");
  if (raw.empty()) parse_error("identity has no components");
  std::vector<ModVector> comps;
  for (const auto& c : raw) {
    for (u64 v : c) {
      if (v >= q) parse_error("identity coordinate out of range");
    }
    comps.emplace_back(c, q);
  }
  try {
    return IdentityPath(std::move(comps));
  } catch (const Error& e) {
    parse_error(std::string("identity: ") + e.what());
  }
}

Json to_json(const ParamSet& p) {
  Json j;
  j["profile"] = p.profile;
  j["lambda"] = p.lambda;
  j["d"] = p.d;
  j["n"] = p.n;
  j["q"] = p.q;
  j["k"] = p.k;
  j["omega"] = p.omega;
  j["m"] = p.m;
  j["sigma"] = p.sigma;
  j["tau"] = p.tau;
  j["alpha"] = p.alpha;
  j["r"] = p.r;
  return j;
}

ParamSet params_from_json(const Json& j) {
  ParamSet p;
  p.profile = field<std::string>(j, "profile");
  p.lambda = field<std::size_t>(j, "lambda");
  p.d = field<std::size_t>(j, "d");
  p.n = field<std::size_t>(j, "n");
  p.q = field<u64>(j, "q");
  p.k = field<unsigned>(j, "k");
  p.omega = field<std::size_t>(j, "omega");
  p.m = field<std::size_t>(j, "m");
  p.sigma = field<std::vector<double>>(j, "sigma");
  p.tau = field<double>(j, "tau");
  p.alpha = field<double>(j, "alpha");
  p.r = field<double>(j, "r");
  validate(p);
  return p;
}

std::string params_digest(const ParamSet& p) {
  const std::string text = to_json(p).dump();
  std::uint8_t out[32];
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_shake256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, text.data(), text.size()) != 1 ||
      EVP_DigestFinalXOF(ctx, out, sizeof out) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error(Errc::kInconsistent, "SHAKE-256 unavailable");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (std::uint8_t b : out) {
    s.push_back(hex[b >> 4]);
    s.push_back(hex[b & 15]);
  }
  return s;
}

Json envelope(const std::string& kind, const ParamSet& p, Json body) {
  Json j;
  j["version"] = kFormatVersion;
  j["kind"] = kind;
  j["params_digest"] = params_digest(p);
  j["body"] = std::move(body);
  return j;
}

std::string envelope_kind(const Json& j) {
  if (field<int>(j, "version") != kFormatVersion) parse_error("unsupported format version");
  return field<std::string>(j, "kind");
}

const Json& open_envelope(const Json& j, const std::string& kind, const ParamSet& p) {
  const std::string got = envelope_kind(j);
  if (got != kind) parse_error("expected a '" + kind + "' file, got '" + got + "'");
  if (field<std::string>(j, "params_digest") != params_digest(p)) {
    throw Error(Errc::kInconsistent, "params digest mismatch: file was made under other parameters");
  }
  return sub(j, "body");
}

Json to_json(const MasterPublicKey& mpk) {
  Json ai = Json::array();
  for (const ModMatrix& x : mpk.ai) ai.push_back(to_json(x));
  Json j;
  j["a"] = to_json(mpk.a);
  j["a_i"] = std::move(ai);
  j["u1"] = to_json(mpk.u1);
  j["u2"] = to_json(mpk.u2);
  return j;
}

MasterPublicKey mpk_from_json(const Json& j, const Scheme& scheme) {
  MasterPublicKey mpk;
  mpk.a = mod_matrix_from_json(sub(j, "a"));
  const Json& ai = sub(j, "a_i");
  if (!ai.is_array()) parse_error("a_i must be an array");
  for (const Json& x : ai) mpk.ai.push_back(mod_matrix_from_json(x));
  mpk.u1 = mod_matrix_from_json(sub(j, "u1"));
  mpk.u2 = mod_matrix_from_json(sub(j, "u2"));
  scheme.check(mpk);
  return mpk;
}

Json to_json(const MasterSecretKey& msk) {
  Json j;
  j["r0"] = to_json(msk.r0);
  j["r1"] = to_json(msk.r1);
  return j;
}

MasterSecretKey msk_from_json(const Json& j, const Scheme& scheme) {
  MasterSecretKey msk{int_matrix_from_json(sub(j, "r0")), int_matrix_from_json(sub(j, "r1"))};
  scheme.check(msk);
  return msk;
}

Json to_json(const SecretKey& sk) {
  Json basis;
  basis["b"] = to_json(sk.basis.b());
  if (const detail::Completion* c = detail::BasisAccess::completion(sk.basis)) {
    Json comp;
    comp["column"] = c->column;
    comp["aux"] = to_json(IntMatrix::from_columns({c->aux}, c->aux.size()));
    Json coeff = Json::array();
    for (const mpz_class& v : c->coeff) coeff.push_back(to_hex(v));
    comp["coeff"] = std::move(coeff);
    comp["denom"] = to_hex(c->denom);
    comp["index"] = to_hex(c->index);
    basis["completion"] = std::move(comp);
  } else {
    basis["completion"] = nullptr;
  }
  Json j;
  j["id"] = to_json(sk.id);
  j["basis"] = std::move(basis);
  return j;
}

SecretKey sk_from_json(const Json& j, const Scheme& scheme, const MasterPublicKey& mpk) {
  IdentityPath id = identity_from_json(sub(j, "id"), scheme.params().q);
  const Json& basis = sub(j, "basis");
  IntMatrix b = int_matrix_from_json(sub(basis, "b"));
  std::optional<detail::Completion> completion;
  const Json& cj = sub(basis, "completion");
  if (!cj.is_null()) {
    detail::Completion c;
    c.column = field<std::size_t>(cj, "column");
    const IntMatrix aux = int_matrix_from_json(sub(cj, "aux"));
    if (aux.cols() != 1) parse_error("completion aux must be a column");
    c.aux = aux.column(0);
    const Json& coeff = sub(cj, "coeff");
    if (!coeff.is_array()) parse_error("completion coeff must be an array");
    for (const Json& v : coeff) c.coeff.push_back(from_hex(v));
    c.denom = from_hex(sub(cj, "denom"));
    c.index = from_hex(sub(cj, "index"));
    completion = std::move(c);
  }
  ModMatrix f = scheme.build_f(mpk, id);
  if (b.rows() != f.cols() || b.cols() != f.cols()) {
    throw Error(Errc::kDimension, "secret key basis does not match the identity depth");
  }
  ShortBasis sb = detail::BasisAccess::restore(std::move(f), std::move(b), std::move(completion));
  return SecretKey{std::move(id), std::move(sb)};
}

Json to_json(const TracingKey& tsk) {
  Json j;
  j["id"] = to_json(tsk.id);
  j["d"] = to_json(tsk.d);
  return j;
}

TracingKey tsk_from_json(const Json& j, const Scheme& scheme) {
  TracingKey tsk{identity_from_json(sub(j, "id"), scheme.params().q),
                 int_matrix_from_json(sub(j, "d"))};
  const ParamSet& p = scheme.params();
  if (tsk.d.rows() != p.m + p.omega || tsk.d.cols() != p.lambda) {
    throw Error(Errc::kDimension, "tracing key: bad shape");
  }
  return tsk;
}

Json to_json(const Ciphertext& ct) {
  Json j;
  j["depth"] = ct.depth;
  j["c0"] = to_json(ct.c0);
  j["c1"] = to_json(ct.c1);
  j["c2"] = to_json(ct.c2);
  j["c3"] = to_json(ct.c3);
  j["c4"] = to_json(ct.c4);
  j["k"] = bits_to_string(ct.k);
  return j;
}

Ciphertext ct_from_json(const Json& j, const Scheme& scheme) {
  Ciphertext ct;
  ct.depth = field<std::size_t>(j, "depth");
  ct.c0 = mod_vector_from_json(sub(j, "c0"));
  ct.c1 = mod_vector_from_json(sub(j, "c1"));
  ct.c2 = mod_vector_from_json(sub(j, "c2"));
  ct.c3 = mod_vector_from_json(sub(j, "c3"));
  ct.c4 = mod_vector_from_json(sub(j, "c4"));
  ct.k = bits_from_string(field<std::string>(j, "k"));
  try {
    scheme.check(ct);
  } catch (const Error& e) {
    parse_error(e.what());
  }
  return ct;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kParse, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception&) {
    parse_error("malformed JSON in " + path.string());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kParse, "cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) throw Error(Errc::kParse, "write failed: " + path.string());
}

}  // namespace ahibet::io
