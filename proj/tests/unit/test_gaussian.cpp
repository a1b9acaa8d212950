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

#include "ahibet/errors.hpp"
#include "ahibet/gaussian.hpp"
#include "oracles.hpp"

namespace ahibet {
namespace {

RandomSource rng_for(std::uint8_t tag) {
  RandomSource::Seed seed{};
  seed[0] = 0x3c;
  seed[1] = tag;
  return RandomSource(seed);
}

TEST(RandomSource, DeterministicAndHexSeeded) {
  RandomSource a = rng_for(1), b = rng_for(1), c = rng_for(2);
  const u64 x = a.next_u64();
  EXPECT_EQ(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
  RandomSource h = RandomSource::from_hex(std::string(64, '0'));
  RandomSource z(RandomSource::Seed{});
  EXPECT_EQ(h.next_u64(), z.next_u64());
  EXPECT_THROW(RandomSource::from_hex("abc"), Error);
  EXPECT_THROW(RandomSource::from_hex(std::string(64, 'g')), Error);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(a.uniform_below(7), 7u);
}

TEST(SampleZ, MatchesPmfTable) {
  for (double sigma : {2.0, 4.0, 8.0}) {
    RandomSource rng = rng_for(static_cast<std::uint8_t>(sigma));
    const oracle::PmfTable p = oracle::brute_pmf(sigma, 0.0);
    std::map<i64, std::size_t> counts;
    for (int i = 0; i < 100000; ++i) ++counts[sample_z({sigma, 0.0, kTailcut}, rng)];
    EXPECT_LT(oracle::tv_distance(p, counts), 0.01) << "sigma " << sigma;
  }
}

TEST(SampleZ, OffCentreAndMean) {
  RandomSource rng = rng_for(10);
  const oracle::PmfTable p = oracle::brute_pmf(2.5, 0.3);
  std::map<i64, std::size_t> counts;
  double mean = 0;
  for (int i = 0; i < 100000; ++i) {
    const i64 x = sample_z({2.5, 0.3, kTailcut}, rng);
    ++counts[x];
  }
  EXPECT_LT(oracle::tv_distance(p, counts), 0.01);
  for (int i = 0; i < 100000; ++i) mean += static_cast<double>(sample_z({4.0, 0.0, kTailcut}, rng));
  EXPECT_LT(std::abs(mean / 100000), 0.05);
}

TEST(SampleZ, TailAndPreconditions) {
  RandomSource rng = rng_for(11);
  const GaussianParam p{1.0, 0.0, 6.0};
  for (int i = 0; i < 20000; ++i) EXPECT_LE(std::abs(sample_z(p, rng)), 6);
  EXPECT_THROW(sample_z({0.0, 0.0, kTailcut}, rng), Error);
  EXPECT_THROW(sample_z({1.0, 0.0, 5.0}, rng), Error);
}

TEST(SampleZMatrix, NormsAndVariance) {
  RandomSource rng = rng_for(12);
  const double sigma = 3.0;
  const IntMatrix r = sample_z_matrix(64, 100, sigma, rng);
  int within = 0;
  for (std::size_t j = 0; j < r.cols(); ++j) {
    double n2 = 0;
    for (std::size_t i = 0; i < r.rows(); ++i) {
      EXPECT_LE(std::abs(r.at(i, j)), 39);
      n2 += static_cast<double>(r.at(i, j)) * r.at(i, j);
    }
    if (std::sqrt(n2) <= sigma * std::sqrt(64.0)) ++within;
  }
  EXPECT_GE(within, 99);

  const IntMatrix big = sample_z_matrix(1000, 1000, sigma, rng);
  long double s2 = 0;
  for (i64 v : big.data()) s2 += static_cast<long double>(v) * v;
  const double var = static_cast<double>(s2 / big.data().size());
  const double truth = oracle::brute_pmf(sigma, 0.0).variance();
  EXPECT_NEAR(var, truth, 0.05 * truth);
}

TEST(SampleZ, NormBoundOverDimensions) {
  RandomSource rng = rng_for(13);
  for (double sigma : {3.0, 8.0}) {
    for (std::size_t m : {16u, 64u}) {
      int over = 0;
      for (int t = 0; t < 1000; ++t) {
        double n2 = 0;
        for (std::size_t i = 0; i < m; ++i) {
          const double x = static_cast<double>(sample_z({sigma, 0.0, kTailcut}, rng));
          n2 += x * x;
        }
        if (std::sqrt(n2) > sigma * std::sqrt(static_cast<double>(m))) ++over;
      }
      EXPECT_LE(over, 10) << sigma << " " << m;
    }
  }
}

TEST(KleinSample, IdentityBasisIsCoordinatewise) {
  const IntMatrix id = IntMatrix::identity(5);
  const GramSchmidtData gs = gram_schmidt(id);
  const std::vector<double> center{0.5, -1.25, 3.0, 0.0, 7.75};
  const double sigma = 4.0;
  RandomSource a = rng_for(20), b = rng_for(20);
  for (int t = 0; t < 200; ++t) {
    const IntVector x = klein_sample(id, gs, sigma, center, a);
    // Coordinates are drawn from the last to the first.
    IntVector expect(5);
    for (int i = 4; i >= 0; --i) expect[i] = sample_z({sigma, center[i], kTailcut}, b);
    EXPECT_EQ(x, expect);
  }
}

TEST(KleinSample, ScaledLatticeMatchesOracle) {
  const IntMatrix b(2, 2, {2, 0, 0, 2});
  const GramSchmidtData gs = gram_schmidt(b);
  const double sigma = 8.0;
  ASSERT_GE(sigma, gs.max_norm * gs_slack(2.0));
  // Exact D_{2Z^2, sigma} factorizes over coordinates of 2Z.
  std::map<std::pair<i64, i64>, double> p;
  const oracle::PmfTable half = oracle::brute_pmf(sigma / 2, 0.0);
  for (std::size_t i = 0; i < half.probs.size(); ++i) {
    for (std::size_t j = 0; j < half.probs.size(); ++j) {
      p[{2 * (half.lo + static_cast<i64>(i)), 2 * (half.lo + static_cast<i64>(j))}] = half.probs[i] * half.probs[j];
    }
  }
  RandomSource rng = rng_for(21);
  std::map<std::pair<i64, i64>, std::size_t> counts;
  const std::vector<double> center{0.0, 0.0};
  for (int t = 0; t < 100000; ++t) {
    const IntVector x = klein_sample(b, gs, sigma, center, rng);
    ++counts[{x[0], x[1]}];
  }
  EXPECT_LT(oracle::tv_distance(p, counts), 0.02);
}

TEST(KleinSample, RejectsSmallSigma) {
  const IntMatrix b(2, 2, {2, 0, 0, 2});
  RandomSource rng = rng_for(22);
  const std::vector<double> center{0.0, 0.0};
  EXPECT_THROW(klein_sample(b, gram_schmidt(b), 2.0, center, rng), Error);
}

TEST(SampleNonspherical, CovarianceAndMean) {
  RandomSource rng = rng_for(30);
  const double s2 = 25.0;
  const std::vector<double> cov{s2, 0, 0, 0, s2, 0, 0, 0, s2};
  std::vector<std::vector<double>> samples;
  for (int t = 0; t < 100000; ++t) {
    const IntVector x = sample_nonspherical(cov, 3, rng);
    samples.push_back({static_cast<double>(x[0]), static_cast<double>(x[1]), static_cast<double>(x[2])});
  }
  const auto est = oracle::covariance_est(samples);
  const double rounding = oracle::brute_pmf(kRoundingWidth, 0.0).variance();
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(est[i * 3 + i], s2 + rounding, 0.1 * (s2 + rounding));
    double mean = 0;
    for (const auto& s : samples) mean += s[i];
    EXPECT_LT(std::abs(mean / samples.size()), 0.05 * std::sqrt(5.0));
  }
  const std::vector<double> bad{1, 2, 2, 1};
  EXPECT_THROW(sample_nonspherical(bad, 2, rng), Error);
}

TEST(Rerand, IdentityGivesWidthTwoRSigma) {
  RandomSource rng = rng_for(40);
  const u64 q = 1000003;
  const std::size_t m = 4;
  const double r = gs_slack(static_cast<double>(m));
  const double sigma = 2.0;
  const IntMatrix d = IntMatrix::identity(m);
  std::vector<long double> sum(m, 0), sum2(m, 0);
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    ModVector c(m, q);
    for (std::size_t i = 0; i < m; ++i) c.set(i, reduce_signed(sample_z({r, 0.0, kTailcut}, rng), q));
    const ModVector out = rerand(d, c, r, sigma, rng);
    for (std::size_t i = 0; i < m; ++i) {
      const long double v = center_lift(out[i], q);
      sum[i] += v;
      sum2[i] += v * v;
    }
  }
  const double want = oracle::brute_pmf(2 * r * sigma, 0.0).variance();
  for (std::size_t i = 0; i < m; ++i) {
    const double mean = static_cast<double>(sum[i] / trials);
    const double var = static_cast<double>(sum2[i] / trials) - mean * mean;
    EXPECT_NEAR(var, want, 0.1 * want);
    EXPECT_LT(std::abs(mean), 4 * std::sqrt(want / trials));
  }
  ModVector c(m, q);
  EXPECT_THROW(rerand(d, c, r, 0.5, rng), Error);
  EXPECT_THROW(rerand(d, c, 1.0, sigma, rng), Error);
}

TEST(Rerand, DoubledIdentityHalvesAgree) {
  RandomSource rng = rng_for(41);
  const u64 q = 1000003;
  const std::size_t m = 3;
  const IntMatrix d = hconcat(IntMatrix::identity(m), IntMatrix::identity(m));
  const double r = gs_slack(2.0 * m);
  const double sigma = 2.0;
  long double v1 = 0, v2 = 0;
  for (int t = 0; t < 40000; ++t) {
    ModVector c(m, q);
    for (std::size_t i = 0; i < m; ++i) c.set(i, reduce_signed(sample_z({r, 0.0, kTailcut}, rng), q));
    const ModVector out = rerand(d, c, r, sigma, rng);
    for (std::size_t i = 0; i < m; ++i) {
      const long double a = center_lift(out[i], q), b = center_lift(out[i + m], q);
      v1 += a * a;
      v2 += b * b;
    }
  }
  EXPECT_NEAR(static_cast<double>(v1 / v2), 1.0, 0.05);
}

}  // namespace
}  // namespace ahibet
