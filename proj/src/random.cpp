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

#include "ahibet/random.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <cstring>

#include "ahibet/errors.hpp"

namespace ahibet {

struct RandomSource::Cipher {
  EVP_CIPHER_CTX* ctx = nullptr;
  ~Cipher() { EVP_CIPHER_CTX_free(ctx); }
};

RandomSource::RandomSource(const Seed& seed) : cipher_(std::make_unique<Cipher>()) {
  cipher_->ctx = EVP_CIPHER_CTX_new();
  // 16-byte IV: 32-bit block counter followed by a 96-bit nonce, all zero.
  const std::array<std::uint8_t, 16> iv{};
  if (cipher_->ctx == nullptr ||
      EVP_EncryptInit_ex(cipher_->ctx, EVP_chacha20(), nullptr, seed.data(),
                         iv.data()) != 1) {
    throw std::runtime_error("ChaCha20 initialisation failed");
  }
}

RandomSource RandomSource::from_hex(std::string_view hex) {
  if (hex.size() != 64) throw Error(Errc::kParse, "seed must be 64 hex digits");
  Seed seed{};
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (std::size_t i = 0; i < 32; ++i) {
    const int hi = nibble(hex[2 * i]), lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(Errc::kParse, "seed is not hexadecimal");
    seed[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return RandomSource(seed);
}

RandomSource RandomSource::from_entropy() {
  Seed seed{};
  if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1) {
    throw std::runtime_error("system entropy unavailable");
  }
  return RandomSource(seed);
}

RandomSource::RandomSource(RandomSource&&) noexcept = default;
RandomSource& RandomSource::operator=(RandomSource&&) noexcept = default;
RandomSource::~RandomSource() = default;

void RandomSource::refill() {
  static const std::array<std::uint8_t, 4096> zeros{};
  int len = 0;
  if (EVP_EncryptUpdate(cipher_->ctx, buffer_.data(), &len, zeros.data(),
                        static_cast<int>(zeros.size())) != 1 ||
      len != static_cast<int>(buffer_.size())) {
    throw std::runtime_error("ChaCha20 keystream failed");
  }
  pos_ = 0;
}

void RandomSource::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (pos_ == buffer_.size()) refill();
    const std::size_t take = std::min(out.size() - done, buffer_.size() - pos_);
    std::memcpy(out.data() + done, buffer_.data() + pos_, take);
    pos_ += take;
    done += take;
  }
}

u64 RandomSource::next_u64() {
  if (buffer_.size() - pos_ < 8) {
    std::uint8_t b[8];
    fill(b);
    u64 v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  u64 v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buffer_[pos_ + i];
  pos_ += 8;
  return v;
}

u64 RandomSource::uniform_below(u64 bound) {
  if (bound == 0) throw Error(Errc::kPrecondition, "uniform_below(0)");
  // Reject the top partial copy of [0, bound).
  const u64 limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  for (;;) {
    const u64 v = next_u64();
    if (v <= limit) return v % bound;
  }
}

double RandomSource::uniform_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

}  // namespace ahibet
