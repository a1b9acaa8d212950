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

#ifndef AHIBET_SERIALIZE_HPP_
#define AHIBET_SERIALIZE_HPP_

#include <filesystem>
#include <string>

#include "json.hpp"

#include "ahibet/scheme.hpp"

// JSON file formats. Every file is an envelope
//   {"version": 1, "kind": ..., "params_digest": ..., "body": ...}
// and matrices are {"rows", "cols", "q" (null for signed), "data"} with data
// the base64 of row-major 8-byte little-endian values. Field order is fixed,
// so equal objects serialize to equal bytes.
namespace ahibet::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

Json to_json(const ModMatrix& a);
Json to_json(const IntMatrix& a);
// Vectors are stored as single-row matrices.
Json to_json(const ModVector& v);
Json to_json(const IdentityPath& id);
Json to_json(const ParamSet& p);

ModMatrix mod_matrix_from_json(const Json& j);
IntMatrix int_matrix_from_json(const Json& j);
ModVector mod_vector_from_json(const Json& j);
IdentityPath identity_from_json(const Json& j, u64 q);
ParamSet params_from_json(const Json& j);

// Hex SHAKE-256 (32 bytes) of the compact canonical params JSON.
std::string params_digest(const ParamSet& p);

Json envelope(const std::string& kind, const ParamSet& p, Json body);
// Checks version, kind and digest; returns the body. A digest mismatch
// throws Errc::kInconsistent, anything malformed Errc::kParse.
const Json& open_envelope(const Json& j, const std::string& kind, const ParamSet& p);
std::string envelope_kind(const Json& j);

Json to_json(const MasterPublicKey& mpk);
Json to_json(const MasterSecretKey& msk);
Json to_json(const SecretKey& sk);
Json to_json(const TracingKey& tsk);
Json to_json(const Ciphertext& ct);

MasterPublicKey mpk_from_json(const Json& j, const Scheme& scheme);
MasterSecretKey msk_from_json(const Json& j, const Scheme& scheme);
// Rebuilds F_id from the public key; the basis is checked against it.
SecretKey sk_from_json(const Json& j, const Scheme& scheme, const MasterPublicKey& mpk);
TracingKey tsk_from_json(const Json& j, const Scheme& scheme);
Ciphertext ct_from_json(const Json& j, const Scheme& scheme);

Json read_json(const std::filesystem::path& path);
// Compact dump plus a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace ahibet::io

#endif  // AHIBET_SERIALIZE_HPP_
