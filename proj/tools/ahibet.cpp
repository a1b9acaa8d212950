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

// Command-line front end: parameter generation, key lifecycle, encryption,
// decryption and batch tracing. Exit codes: 0 success, 1 cryptographic
// reject, 2 usage / IO / parameter mismatch.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ahibet/errors.hpp"
#include "ahibet/scheme.hpp"
#include "ahibet/serialize.hpp"

namespace fs = std::filesystem;
using namespace ahibet;
using io::Json;

namespace {

constexpr int kOk = 0;
constexpr int kReject = 1;
constexpr int kUsage = 2;

struct Options {
  std::string seed;
  std::string params, mpk, msk, sk, tsk, id, in, out, profile = "toy-small", registry;
  std::size_t lambda = 16, depth = 2;
  std::vector<std::string> files;
};

RandomSource make_rng(const Options& o) {
  return o.seed.empty() ? RandomSource::from_entropy() : RandomSource::from_hex(o.seed);
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kParse, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::kParse, "write failed: " + path.string());
}

// Messages travel as lambda-bit blocks, most significant bit of each byte
// first, the last block zero-padded. An empty message still takes a block.
std::vector<std::vector<int>> to_blocks(const std::vector<std::uint8_t>& bytes, std::size_t lambda) {
  std::vector<int> bits;
  for (std::uint8_t b : bytes) {
    for (int i = 7; i >= 0; --i) bits.push_back((b >> i) & 1);
  }
  const std::size_t count = std::max<std::size_t>(1, (bits.size() + lambda - 1) / lambda);
  bits.resize(count * lambda, 0);
  std::vector<std::vector<int>> blocks;
  for (std::size_t i = 0; i < count; ++i) {
    blocks.emplace_back(bits.begin() + i * lambda, bits.begin() + (i + 1) * lambda);
  }
  return blocks;
}

std::vector<std::uint8_t> from_blocks(const std::vector<std::vector<int>>& blocks, std::size_t length) {
  std::vector<int> bits;
  for (const auto& b : blocks) bits.insert(bits.end(), b.begin(), b.end());
  if (bits.size() < 8 * length) throw Error(Errc::kParse, "ciphertext shorter than its message length");
  std::vector<std::uint8_t> bytes(length, 0);
  for (std::size_t i = 0; i < 8 * length; ++i) {
    if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (7 - i % 8));
  }
  return bytes;
}

struct Context {
  ParamSet params;
  Scheme scheme;
  explicit Context(const std::string& path)
      : params(load_params(path)), scheme(params) {}

  static ParamSet load_params(const std::string& path) {
    const Json j = io::read_json(path);
    if (io::envelope_kind(j) != "params") throw Error(Errc::kParse, path + " is not a params file");
    ParamSet p = io::params_from_json(j.at("body"));
    if (j.value("params_digest", "") != io::params_digest(p)) {
      throw Error(Errc::kInconsistent, "params digest mismatch in " + path);
    }
    return p;
  }

  const Json& body(const Json& j, const char* kind) const {
    return io::open_envelope(j, kind, params);
  }
  MasterPublicKey mpk(const std::string& path) const {
    return io::mpk_from_json(body(io::read_json(path), "mpk"), scheme);
  }
  MasterSecretKey msk(const std::string& path) const {
    return io::msk_from_json(body(io::read_json(path), "msk"), scheme);
  }
  IdentityPath identity(const std::string& path) const {
    return io::identity_from_json(io::read_json(path), params.q);
  }
  void save(const std::string& path, const char* kind, Json b) const {
    io::write_json(path, io::envelope(kind, params, std::move(b)));
  }
};

struct MessageCiphertext {
  std::size_t length = 0;
  std::vector<Ciphertext> blocks;
};

MessageCiphertext load_ct(const Context& ctx, const std::string& path) {
  const Json file = io::read_json(path);
  const Json& b = ctx.body(file, "ct");
  MessageCiphertext out;
  if (!b.is_object() || !b.contains("length") || !b.contains("blocks") || !b.at("blocks").is_array() ||
      !b.at("length").is_number_unsigned()) {
    throw Error(Errc::kParse, path + ": malformed ciphertext body");
  }
  out.length = b.at("length").get<std::size_t>();
  for (const Json& c : b.at("blocks")) out.blocks.push_back(io::ct_from_json(c, ctx.scheme));
  if (out.blocks.empty()) throw Error(Errc::kParse, path + ": no ciphertext blocks");
  return out;
}

bool verify_all(const Context& ctx, const MasterPublicKey& mpk, const TracingKey& tsk,
                const MessageCiphertext& ct) {
  for (const Ciphertext& c : ct.blocks) {
    if (!ctx.scheme.tk_ver(mpk, tsk.id, tsk, c)) return false;
  }
  return true;
}

int cmd_params(const Options& o) {
  const ParamSet p = derive_params(o.lambda, o.depth, o.profile);
  io::write_json(o.out, io::envelope("params", p, io::to_json(p)));
  return kOk;
}

int cmd_validate(const Options& o) {
  const ParamSet p = Context::load_params(o.params);
  std::cout << "OK " << p.profile << " q=" << p.q << " bound=" << p.noise_bound() << " q/4=" << p.q / 4
            << "\n";
  return kOk;
}

int cmd_setup(const Options& o) {
  const Context ctx(o.params);
  RandomSource rng = make_rng(o);
  auto [mpk, msk] = ctx.scheme.setup(rng);
  fs::create_directories(o.out);
  ctx.save((fs::path(o.out) / "mpk.json").string(), "mpk", io::to_json(mpk));
  ctx.save((fs::path(o.out) / "msk.json").string(), "msk", io::to_json(msk));
  return kOk;
}

int cmd_extract(const Options& o) {
  const Context ctx(o.params);
  RandomSource rng = make_rng(o);
  const SecretKey sk = ctx.scheme.extract(ctx.mpk(o.mpk), ctx.msk(o.msk), ctx.identity(o.id), rng);
  ctx.save(o.out, "sk", io::to_json(sk));
  return kOk;
}

int cmd_derive(const Options& o) {
  const Context ctx(o.params);
  RandomSource rng = make_rng(o);
  const MasterPublicKey mpk = ctx.mpk(o.mpk);
  const SecretKey parent = io::sk_from_json(ctx.body(io::read_json(o.sk), "sk"), ctx.scheme, mpk);
  const SecretKey child = ctx.scheme.derive(mpk, parent, ctx.identity(o.id), rng);
  ctx.save(o.out, "sk", io::to_json(child));
  return kOk;
}

int cmd_tskgen(const Options& o) {
  const Context ctx(o.params);
  RandomSource rng = make_rng(o);
  const IdentityPath id = ctx.identity(o.id);
  if (!o.registry.empty()) {
    // Advisory: an identity should receive a single tracing key.
    const std::string line = io::to_json(id).dump();
    std::set<std::string> seen;
    if (std::ifstream in(o.registry); in) {
      for (std::string l; std::getline(in, l);) seen.insert(l);
    }
    if (seen.count(line)) {
      std::cerr << "warning: identity already holds a tracing key (registry " << o.registry << ")\n";
    } else {
      std::ofstream(o.registry, std::ios::app) << line << '\n';
    }
  }
  const TracingKey tsk = ctx.scheme.tsk_gen(ctx.mpk(o.mpk), ctx.msk(o.msk), id, rng);
  ctx.save(o.out, "tsk", io::to_json(tsk));
  return kOk;
}

int cmd_encrypt(const Options& o) {
  const Context ctx(o.params);
  RandomSource rng = make_rng(o);
  const MasterPublicKey mpk = ctx.mpk(o.mpk);
  const IdentityPath id = ctx.identity(o.id);
  const std::vector<std::uint8_t> msg = read_bytes(o.in);
  Json blocks = Json::array();
  for (const auto& block : to_blocks(msg, ctx.params.lambda)) {
    blocks.push_back(io::to_json(ctx.scheme.encrypt(mpk, id, block, rng)));
  }
  Json body;
  body["length"] = msg.size();
  body["blocks"] = std::move(blocks);
  ctx.save(o.out, "ct", std::move(body));
  return kOk;
}

int cmd_decrypt(const Options& o) {
  const Context ctx(o.params);
  const MasterPublicKey mpk = ctx.mpk(o.mpk);
  const SecretKey sk = io::sk_from_json(ctx.body(io::read_json(o.sk), "sk"), ctx.scheme, mpk);
  const MessageCiphertext ct = load_ct(ctx, o.in);
  std::vector<std::vector<int>> bits;
  for (const Ciphertext& c : ct.blocks) {
    DecryptResult r = ctx.scheme.decrypt(mpk, c, sk);
    if (!r.message) {
      std::cout << "REJECT\n";
      return kReject;
    }
    bits.push_back(std::move(*r.message));
  }
  write_bytes(o.out, from_blocks(bits, ct.length));
  return kOk;
}

TracingKey load_tsk(const Context& ctx, const std::string& path) {
  return io::tsk_from_json(ctx.body(io::read_json(path), "tsk"), ctx.scheme);
}

int cmd_tkver(const Options& o) {
  const Context ctx(o.params);
  const MasterPublicKey mpk = ctx.mpk(o.mpk);
  const bool match = verify_all(ctx, mpk, load_tsk(ctx, o.tsk), load_ct(ctx, o.in));
  std::cout << (match ? "MATCH" : "NO-MATCH") << "\n";
  return match ? kOk : kReject;
}

int cmd_trace(const Options& o) {
  const Context ctx(o.params);
  const MasterPublicKey mpk = ctx.mpk(o.mpk);
  const TracingKey tsk = load_tsk(ctx, o.tsk);
  int rc = kOk;
  for (const std::string& path : o.files) {
    try {
      const bool match = verify_all(ctx, mpk, tsk, load_ct(ctx, path));
      std::cout << path << '\t' << (match ? "MATCH" : "NO-MATCH") << "\n";
    } catch (const Error& e) {
      std::cout << path << '\t' << "ERROR" << "\n";
      std::cerr << path << ": " << e.what() << "\n";
      rc = kUsage;
    }
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Anonymous hierarchical identity-based encryption with traceable identities"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", o.seed, "32-byte seed as 64 hex digits (default: OS entropy)");

  auto need = [&](CLI::App* sub, const char* flag, std::string& dst, const char* help) {
    sub->add_option(flag, dst, help)->required();
  };

  auto* params = app.add_subcommand("params", "derive a parameter set");
  params->add_option("--lambda", o.lambda, "message and tag bits")->capture_default_str();
  params->add_option("--depth", o.depth, "maximum hierarchy depth")->capture_default_str();
  params->add_option("--profile", o.profile, "toy-small | toy-medium | asymptotic-demo")
      ->capture_default_str();
  need(params, "-o", o.out, "output params file");

  auto* validate_cmd = app.add_subcommand("validate", "check a params file");
  need(validate_cmd, "--params", o.params, "params file");

  auto* setup = app.add_subcommand("setup", "generate master keys into a directory");
  need(setup, "--params", o.params, "params file");
  need(setup, "-o", o.out, "output directory (mpk.json, msk.json)");

  auto* extract = app.add_subcommand("extract", "secret key for a depth-1 identity");
  auto* derive = app.add_subcommand("derive", "child secret key from a parent key");
  auto* tskgen = app.add_subcommand("tskgen", "tracing key for an identity");
  auto* encrypt = app.add_subcommand("encrypt", "encrypt a file for an identity");
  auto* decrypt = app.add_subcommand("decrypt", "decrypt a ciphertext file");
  auto* tkver = app.add_subcommand("tkver", "test whether a ciphertext targets the traced identity");
  auto* trace = app.add_subcommand("trace", "run tkver over a batch of ciphertexts");
  for (CLI::App* sub : {extract, derive, tskgen, encrypt, decrypt, tkver, trace}) {
    need(sub, "--params", o.params, "params file");
    need(sub, "--mpk", o.mpk, "master public key");
  }
  need(extract, "--msk", o.msk, "master secret key");
  need(extract, "--id", o.id, "identity file");
  need(extract, "-o", o.out, "output secret key");
  need(derive, "--sk", o.sk, "parent secret key");
  need(derive, "--id", o.id, "child identity file");
  need(derive, "-o", o.out, "output secret key");
  need(tskgen, "--msk", o.msk, "master secret key");
  need(tskgen, "--id", o.id, "identity file");
  need(tskgen, "-o", o.out, "output tracing key");
  tskgen->add_option("--registry", o.registry, "warn when an identity is issued a second key");
  need(encrypt, "--id", o.id, "recipient identity file");
  need(encrypt, "--in", o.in, "message file");
  need(encrypt, "-o", o.out, "output ciphertext");
  need(decrypt, "--sk", o.sk, "secret key");
  need(decrypt, "--in", o.in, "ciphertext");
  need(decrypt, "-o", o.out, "output message file");
  need(tkver, "--tsk", o.tsk, "tracing key");
  need(tkver, "--in", o.in, "ciphertext");
  need(trace, "--tsk", o.tsk, "tracing key");
  trace->add_option("files", o.files, "ciphertext files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*params) return cmd_params(o);
    if (*validate_cmd) return cmd_validate(o);
    if (*setup) return cmd_setup(o);
    if (*extract) return cmd_extract(o);
    if (*derive) return cmd_derive(o);
    if (*tskgen) return cmd_tskgen(o);
    if (*encrypt) return cmd_encrypt(o);
    if (*decrypt) return cmd_decrypt(o);
    if (*tkver) return cmd_tkver(o);
    if (*trace) return cmd_trace(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
