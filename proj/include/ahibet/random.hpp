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

#ifndef AHIBET_RANDOM_HPP_
#define AHIBET_RANDOM_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>

#include "ahibet/modq.hpp"

namespace ahibet {

// Deterministic byte stream: the ChaCha20 keystream under a 32-byte seed.
// Single-owner; move but do not share between threads.
class RandomSource {
 public:
  using Seed = std::array<std::uint8_t, 32>;

  explicit RandomSource(const Seed& seed);
  // Parses 64 hex digits; throws Errc::kParse otherwise.
  static RandomSource from_hex(std::string_view hex);
  // Seeded from the operating system.
  static RandomSource from_entropy();

  RandomSource(RandomSource&&) noexcept;
  RandomSource& operator=(RandomSource&&) noexcept;
  RandomSource(const RandomSource&) = delete;
  RandomSource& operator=(const RandomSource&) = delete;
  ~RandomSource();

  void fill(std::span<std::uint8_t> out);
  u64 next_u64();
  // Uniform in [0, bound), bound >= 1, without modulo bias.
  u64 uniform_below(u64 bound);
  // Uniform in [0, 1) with 53 random bits.
  double uniform_double();

 private:
  void refill();

  struct Cipher;
  std::unique_ptr<Cipher> cipher_;
  std::array<std::uint8_t, 4096> buffer_{};
  std::size_t pos_ = 4096;
};

}  // namespace ahibet

#endif  // AHIBET_RANDOM_HPP_
