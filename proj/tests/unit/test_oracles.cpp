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
#include <map>
#include <stdexcept>

#include "oracles.hpp"

namespace ahibet::oracle {
namespace {

RandomSource rng_for(std::uint8_t tag) {
  RandomSource::Seed seed{};
  seed[0] = 0x0a;
  seed[1] = tag;
  return RandomSource(seed);
}

TEST(BrutePmf, NormalizedAndSymmetric) {
  const PmfTable p = brute_pmf(3.0, 0.0);
  double sum = 0;
  for (double v : p.probs) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  for (i64 d = 0; d <= 10; ++d) EXPECT_DOUBLE_EQ(p.prob(d), p.prob(-d));
  EXPECT_EQ(p.lo, -39);
  EXPECT_EQ(p.hi(), 39);
}

TEST(BrutePmf, VarianceTwoWays) {
  for (double sigma : {1.5, 3.0, 7.0}) {
    EXPECT_NEAR(brute_pmf(sigma, 0.0).variance(), halfsum_variance(sigma), 1e-10 * sigma * sigma);
  }
  // Far above the smoothing parameter the variance is sigma^2 / (2 pi).
  EXPECT_NEAR(halfsum_variance(3.0), 9.0 / (2 * M_PI), 1e-9);
}

TEST(TvDistance, Definition) {
  const PmfTable p = brute_pmf(2.0, 0.0);
  std::map<i64, std::size_t> exact;
  for (std::size_t i = 0; i < p.probs.size(); ++i) {
    exact[p.lo + static_cast<i64>(i)] = static_cast<std::size_t>(std::llround(p.probs[i] * 1e12));
  }
  EXPECT_LT(tv_distance(p, exact), 1e-9);

  PmfTable two{0, {0.5, 0.5}};
  EXPECT_DOUBLE_EQ(tv_distance(two, {{0, 6}, {1, 4}}), 0.1);
  PmfTable point{0, {1.0, 0.0}};
  EXPECT_DOUBLE_EQ(tv_distance(point, {{1, 5}}), 1.0);
  EXPECT_THROW(tv_distance(point, {{7, 1}}), std::invalid_argument);
}

TEST(ChiSquare, Degenerate) {
  std::vector<std::uint64_t> flat(10, 1000);
  const ChiSquare c = chi_square_uniform(flat);
  EXPECT_DOUBLE_EQ(c.statistic, 0.0);
  EXPECT_DOUBLE_EQ(c.p_value, 1.0);
  std::vector<std::uint64_t> spike(10, 0);
  spike[3] = 10000;
  EXPECT_LT(chi_square_uniform(spike).p_value, 1e-10);
  std::vector<std::uint64_t> few(10, 1);
  EXPECT_THROW(chi_square_uniform(few), std::invalid_argument);
}

TEST(ChiSquare, CalibratedOnUniformDraws) {
  RandomSource rng = rng_for(1);
  int pass = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::uint64_t> counts(257, 0);
    for (int i = 0; i < 100000; ++i) ++counts[rng.uniform_below(257)];
    if (chi_square_uniform(counts).p_value > 0.001) ++pass;
  }
  EXPECT_GE(pass, 99);
}

TEST(LweInstance, NoiselessAndNoisy) {
  RandomSource rng = rng_for(2);
  const u64 q = 97;
  ModMatrix a(2, 5, q, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  ModVector s({3, 5}, q);
  const LweSample clean = lwe_instance(a, s, 0.0, rng);
  for (std::size_t j = 0; j < 5; ++j) {
    EXPECT_EQ(clean.y[j], (3 * a.at(0, j) + 5 * a.at(1, j)) % q);
    EXPECT_EQ(clean.e[j], 0);
  }
  const LweSample noisy = lwe_instance(a, s, 4.0, rng);
  for (std::size_t j = 0; j < 5; ++j) {
    const i64 diff = static_cast<i64>(noisy.y[j]) - static_cast<i64>(clean.y[j]);
    EXPECT_EQ(((diff - noisy.e[j]) % static_cast<i64>(q) + q) % q, 0);
  }
}

TEST(EnumerateKernel, HandCaseAndFilter) {
  // f = [1] over q = 2: the even integers.
  const auto v = enumerate_kernel(ModMatrix(1, 1, 2, {1}), 2.0);
  std::set<i64> got;
  for (const auto& x : v) got.insert(x[0]);
  EXPECT_EQ(got, (std::set<i64>{-2, 0, 2}));

  const ModMatrix f(1, 3, 5, {1, 2, 4});
  for (const auto& x : enumerate_kernel(f, 4.0)) {
    EXPECT_EQ(((x[0] + 2 * x[1] + 4 * x[2]) % 5 + 5) % 5, 0);
  }
  EXPECT_THROW(enumerate_kernel(ModMatrix(1, 12, 5), 20.0), std::length_error);
}

TEST(EnumerateKernel, CountMatchesDensity) {
  // Lattice of index 5 in Z^3: about vol(ball) / 5 points.
  const ModMatrix f(1, 3, 5, {1, 2, 4});
  const double r = 8.0;
  const double expected = 4.0 / 3.0 * M_PI * r * r * r / 5.0;
  const double count = static_cast<double>(enumerate_kernel(f, r).size());
  EXPECT_GT(count, expected / 2);
  EXPECT_LT(count, expected * 2);
}

TEST(CovarianceEst, ConstantAndDiagonal) {
  std::vector<std::vector<double>> constant(10000, {1.0, 2.0});
  for (double v : covariance_est(constant)) EXPECT_DOUBLE_EQ(v, 0.0);
  EXPECT_THROW(covariance_est(std::vector<std::vector<double>>(10, {1.0})), std::invalid_argument);

  RandomSource rng = rng_for(3);
  const PmfTable p = brute_pmf(4.0, 0.0);
  std::vector<std::vector<double>> s;
  for (int i = 0; i < 50000; ++i) {
    s.push_back({static_cast<double>(draw(p, rng)), static_cast<double>(draw(p, rng))});
  }
  const auto cov = covariance_est(s);
  EXPECT_NEAR(cov[0], p.variance(), 0.1 * p.variance());
  EXPECT_NEAR(cov[3], p.variance(), 0.1 * p.variance());
  EXPECT_LT(std::abs(cov[1]), 0.1 * p.variance());

  // x = A z with A = [[1, 0], [1, 2]] gives A Sigma A^T = v [[1, 1], [1, 5]].
  std::vector<std::vector<double>> mixed;
  for (const auto& z : s) mixed.push_back({z[0], z[0] + 2 * z[1]});
  const auto c2 = covariance_est(mixed);
  const double v = p.variance();
  EXPECT_NEAR(c2[0], v, 0.1 * v);
  EXPECT_NEAR(c2[1], v, 0.1 * v);
  EXPECT_NEAR(c2[3], 5 * v, 0.5 * v);
}

TEST(ExactLinearAlgebra, GramMinorsAndDet) {
  const IntMatrix b(2, 2, {2, 1, 0, 2});  // columns (2,0), (1,2)
  const auto norms = exact_gs_norms(b);
  EXPECT_DOUBLE_EQ(norms[0], 2.0);
  EXPECT_DOUBLE_EQ(norms[1], 2.0);
  EXPECT_EQ(exact_det(b), 4);
  EXPECT_THROW(gram_minors(IntMatrix(2, 2, {1, 1, 1, 1})), std::domain_error);
  EXPECT_EQ(exact_det(IntMatrix(2, 2, {0, 1, 1, 0})), -1);
  EXPECT_EQ(det_mod(ModMatrix(2, 2, 5, {2, 3, 1, 4})), 0u);  // 8 - 3 = 5
  EXPECT_NEAR(singular_max(IntMatrix(2, 2, {3, 0, 4, 0})), 5.0, 1e-12);
}

}  // namespace
}  // namespace ahibet::oracle
