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

#ifndef AHIBET_GAUSSIAN_HPP_
#define AHIBET_GAUSSIAN_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "ahibet/matrix.hpp"
#include "ahibet/random.hpp"

namespace ahibet {

// Concrete stand-in for the omega(sqrt(log x)) smoothing slack.
double gs_slack(double x);

// Width convention: rho(x) = exp(-pi (x - center)^2 / sigma^2), so the
// standard deviation is close to sigma / sqrt(2 pi).
struct GaussianParam {
  double sigma = 1.0;
  double center = 0.0;
  double tailcut = 13.0;
};

inline constexpr double kTailcut = 13.0;

// Discrete Gaussian over Z by rejection from the uniform distribution on
// [center - t sigma, center + t sigma].
i64 sample_z(const GaussianParam& p, RandomSource& rng);

// I.i.d. centred sample_z entries, filled row by row.
IntMatrix sample_z_matrix(std::size_t rows, std::size_t cols, double sigma,
                          RandomSource& rng);

// Randomized nearest-plane sampler for the lattice spanned by the columns of
// `basis`, around `center`. Coordinates are drawn from the last column to the
// first; the returned point is computed exactly in integers.
// Requires sigma >= gs.max_norm * gs_slack(columns).
IntVector klein_sample(const IntMatrix& basis, const GramSchmidtData& gs,
                       double sigma, std::span<const double> center,
                       RandomSource& rng);

// Width of the randomized rounding step in sample_nonspherical.
inline constexpr double kRoundingWidth = 4.0;

// Integer vector with covariance close to `cov` (dim x dim, row-major) plus
// the variance of the rounding step: Cholesky factor times standard normals,
// then each coordinate rounded with D_{Z, 4, y_i}. Throws Errc::kPrecondition
// if cov is not positive definite.
IntVector sample_nonspherical(std::span<const double> cov, std::size_t dim,
                              RandomSource& rng);

// Re-randomizes an LWE vector c = b + z (z of width r) into one for d:
// returns c^T d + w where w compensates the noise to width 2 r sigma.
ModVector rerand(const IntMatrix& d, const ModVector& c, double r, double sigma,
                 RandomSource& rng);

}  // namespace ahibet

#endif  // AHIBET_GAUSSIAN_HPP_
