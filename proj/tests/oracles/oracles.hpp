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

#ifndef AHIBET_TESTS_ORACLES_HPP_
#define AHIBET_TESTS_ORACLES_HPP_

// Brute-force and statistical references for the test suites. Nothing here
// calls the samplers, trapdoor code or scheme it is used to check; only the
// matrix containers and the raw byte stream of RandomSource are shared.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ahibet/matrix.hpp"
#include "ahibet/random.hpp"

namespace ahibet::oracle {

using BigInt = boost::multiprecision::cpp_int;

// Normalized rho_{sigma,c} over the integers in [c - t sigma, c + t sigma].
struct PmfTable {
  i64 lo = 0;
  std::vector<double> probs;

  i64 hi() const { return lo + static_cast<i64>(probs.size()) - 1; }
  double prob(i64 x) const;
  double mean() const;
  double variance() const;
};

PmfTable brute_pmf(double sigma, double center, double tailcut = 13.0);

// Variance of the centred pmf computed as twice the sum over x > 0, in long
// double; a second route to brute_pmf(sigma, 0).variance().
double halfsum_variance(double sigma, double tailcut = 13.0);

// 1/2 sum |p - counts / N|. Throws std::invalid_argument when a count lies
// outside the support.
double tv_distance(const PmfTable& p, const std::map<i64, std::size_t>& counts);

// Same for an arbitrary discrete reference distribution keyed by outcome.
template <typename Key>
double tv_distance(const std::map<Key, double>& p, const std::map<Key, std::size_t>& counts) {
  std::size_t total = 0;
  for (const auto& [k, c] : counts) total += c;
  double tv = 0.0;
  for (const auto& [k, pk] : p) {
    auto it = counts.find(k);
    const double emp = it == counts.end() ? 0.0 : static_cast<double>(it->second) / total;
    tv += std::abs(pk - emp);
  }
  for (const auto& [k, c] : counts) {
    if (!p.count(k)) tv += static_cast<double>(c) / total;
  }
  return tv / 2.0;
}

struct ChiSquare {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Pearson test of counts over Z_q against uniform, q - 1 degrees of freedom.
// Throws std::invalid_argument when N < 10 q.
ChiSquare chi_square_uniform(std::span<const std::uint64_t> counts);

// Inverse-CDF draw from a pmf table using 53 uniform bits of rng.
i64 draw(const PmfTable& p, RandomSource& rng);

struct LweSample {
  ModVector y;
  IntVector e;
};

// y = s^T a + e^T with e_i ~ D_{Z, sigma}; sigma == 0 gives e = 0.
LweSample lwe_instance(const ModMatrix& a, const ModVector& s, double sigma, RandomSource& rng);

// All v with f v == 0 (mod q) and |v| <= radius. Throws std::length_error
// when the search box exceeds `budget` points.
std::vector<IntVector> enumerate_kernel(const ModMatrix& f, double radius,
                                        double budget = 1e8);

// Unbiased sample covariance (dim x dim, row-major). Needs >= 10^4 samples
// unless min_samples says otherwise.
std::vector<double> covariance_est(const std::vector<std::vector<double>>& samples,
                                   std::size_t min_samples = 10000);

// Exact products and reductions with wide intermediates.
ModMatrix mul_mod(const ModMatrix& a, const IntMatrix& b);
bool is_zero(const ModMatrix& a);

// Leading principal minors D_1..D_M of the Gram matrix b^T b (Bareiss), so
// that |b~_j|^2 = D_j / D_{j-1}. Throws std::domain_error on dependence.
std::vector<BigInt> gram_minors(const IntMatrix& b);
double exact_gs_norm(const IntMatrix& b);
std::vector<double> exact_gs_norms(const IntMatrix& b);

// Exact determinant of a square integer matrix (Bareiss).
BigInt exact_det(const IntMatrix& a);
u64 det_mod(const ModMatrix& a);

// Largest singular value from the exact Gram matrix by dense Jacobi
// eigenvalue iteration in long double.
double singular_max(const IntMatrix& r);

}  // namespace ahibet::oracle

#endif  // AHIBET_TESTS_ORACLES_HPP_
