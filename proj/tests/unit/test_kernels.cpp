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

#include <bit>
#include <cstdlib>
#include <vector>

#include "ahibet/kernels.hpp"
#include "ahibet/random.hpp"

namespace ahibet::kernels {
namespace {

std::vector<double> random_doubles(std::size_t n, RandomSource& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = (rng.uniform_double() - 0.5) * std::ldexp(1.0, static_cast<int>(rng.uniform_below(60)) - 30);
  return v;
}

TEST(Kernels, BackendSelection) {
  const char* force = std::getenv("AHIBET_FORCE_SCALAR");
  if (force != nullptr && force[0] != '\0') {
    EXPECT_EQ(active_backend(), Backend::kScalar);
  } else {
    EXPECT_EQ(active_backend(), avx2::supported() ? Backend::kAvx2 : Backend::kScalar);
  }
  EXPECT_STREQ(backend_name(Backend::kScalar), "scalar");
}

TEST(Kernels, ScalarMatchesNaiveFoldOrder) {
  RandomSource rng(RandomSource::Seed{0x2c});
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 129u}) {
    const auto a = random_doubles(n, rng), b = random_doubles(n, rng);
    double lane[4] = {0, 0, 0, 0};
    const std::size_t body = n / 4 * 4;
    for (std::size_t i = 0; i < body; ++i) lane[i % 4] += a[i] * b[i];
    double ref = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = body; i < n; ++i) ref += a[i] * b[i];
    EXPECT_EQ(std::bit_cast<std::uint64_t>(scalar::dot(a.data(), b.data(), n)),
              std::bit_cast<std::uint64_t>(ref));
  }
}

TEST(Kernels, Avx2BitIdenticalToScalar) {
  if (!avx2::supported()) GTEST_SKIP() << "no AVX2 on this CPU";
  RandomSource rng(RandomSource::Seed{0x2d});
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = rng.uniform_below(700);
    const auto a = random_doubles(n, rng), b = random_doubles(n, rng);
    ASSERT_EQ(std::bit_cast<std::uint64_t>(scalar::dot(a.data(), b.data(), n)),
              std::bit_cast<std::uint64_t>(avx2::dot(a.data(), b.data(), n)))
        << "n = " << n;
    const double alpha = rng.uniform_double() * 3 - 1.5;
    auto y1 = random_doubles(n, rng);
    auto y2 = y1;
    scalar::axpy(alpha, a.data(), y1.data(), n);
    avx2::axpy(alpha, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(std::bit_cast<std::uint64_t>(y1[i]), std::bit_cast<std::uint64_t>(y2[i]));
    }
  }
}

TEST(Kernels, UnalignedPointers) {
  if (!avx2::supported()) GTEST_SKIP() << "no AVX2 on this CPU";
  RandomSource rng(RandomSource::Seed{0x2e});
  const auto a = random_doubles(101, rng), b = random_doubles(101, rng);
  for (std::size_t off = 0; off < 4; ++off) {
    EXPECT_EQ(scalar::dot(a.data() + off, b.data() + off, 97 - off),
              avx2::dot(a.data() + off, b.data() + off, 97 - off));
  }
}

}  // namespace
}  // namespace ahibet::kernels
