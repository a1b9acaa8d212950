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

#include "ahibet/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ahibet/errors.hpp"
#include "ahibet/kernels.hpp"

namespace ahibet {

double gs_slack(double x) { return std::sqrt(std::log(2.0 * x) + 10.0); }

i64 sample_z(const GaussianParam& p, RandomSource& rng) {
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
    throw Error(Errc::kPrecondition, "sample_z: sigma must be positive");
  }
  if (!(p.tailcut >= 6.0)) {
    throw Error(Errc::kPrecondition, "sample_z: tailcut must be at least 6");
  }
  const double lo = std::ceil(p.center - p.tailcut * p.sigma);
  const double hi = std::floor(p.center + p.tailcut * p.sigma);
  if (!(lo <= hi) || std::abs(lo) > 0x1.0p62 || std::abs(hi) > 0x1.0p62) {
    throw Error(Errc::kPrecondition, "sample_z: support is empty or too wide");
  }
  const u64 span = static_cast<u64>(hi - lo) + 1;
  const double scale = std::numbers::pi / (p.sigma * p.sigma);
  for (;;) {
    const i64 x = static_cast<i64>(lo) + static_cast<i64>(rng.uniform_below(span));
    const double dx = static_cast<double>(x) - p.center;
    if (rng.uniform_double() < std::exp(-scale * dx * dx)) return x;
  }
}

IntMatrix sample_z_matrix(std::size_t rows, std::size_t cols, double sigma,
                          RandomSource& rng) {
  IntMatrix out(rows, cols);
  const GaussianParam p{sigma, 0.0, kTailcut};
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out.set(i, j, sample_z(p, rng));
  }
  return out;
}

IntVector klein_sample(const IntMatrix& basis, const GramSchmidtData& gs,
                       double sigma, std::span<const double> center,
                       RandomSource& rng) {
  const std::size_t dim = basis.rows(), count = basis.cols();
  if (gs.dim != dim || gs.count != count || center.size() != dim) {
    throw Error(Errc::kDimension, "klein_sample: shapes disagree");
  }
  const double bound = gs.max_norm * gs_slack(static_cast<double>(count));
  if (!(sigma >= bound)) {
    throw Error(Errc::kPrecondition,
                "klein_sample: sigma " + std::to_string(sigma) +
                    " below bound " + std::to_string(bound));
  }
  const std::vector<double> cols = to_column_major(basis);
  std::vector<double> c(center.begin(), center.end());
  std::vector<i64> z(count);
  for (std::size_t i = count; i-- > 0;) {
    const double* bt = gs.column(i);
    const double nsq = gs.norms[i] * gs.norms[i];
    const double ci = kernels::dot(c.data(), bt, dim) / nsq;
    const i64 zi = sample_z({sigma / gs.norms[i], ci, kTailcut}, rng);
    z[i] = zi;
    if (zi != 0) kernels::axpy(-static_cast<double>(zi), cols.data() + i * dim, c.data(), dim);
  }
  IntVector v(dim, 0);
  for (std::size_t i = 0; i < dim; ++i) {
    i128 acc = 0;
    for (std::size_t j = 0; j < count; ++j) {
      acc += static_cast<i128>(basis.at(i, j)) * z[j];
    }
    if (acc > INT64_MAX || acc < INT64_MIN) {
      throw Error(Errc::kOverflow, "klein_sample: lattice point overflows");
    }
    v[i] = static_cast<i64>(acc);
  }
  return v;
}

namespace {

// Lower-triangular L with L L^T = cov, row-major.
std::vector<double> cholesky(std::span<const double> cov, std::size_t dim) {
  std::vector<double> l(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = cov[i * dim + j];
      s -= kernels::dot(&l[i * dim], &l[j * dim], j);
      if (i == j) {
        if (!(s > 0.0)) {
          throw Error(Errc::kPrecondition,
                      "covariance is not positive definite");
        }
        l[i * dim + i] = std::sqrt(s);
      } else {
        l[i * dim + j] = s / l[j * dim + j];
      }
    }
  }
  return l;
}

// Standard normal pair via Box-Muller.
void normal_pair(RandomSource& rng, double& a, double& b) {
  const double u1 = 1.0 - rng.uniform_double();  // (0, 1]
  const double u2 = rng.uniform_double();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  a = rad * std::cos(2.0 * std::numbers::pi * u2);
  b = rad * std::sin(2.0 * std::numbers::pi * u2);
}

}  // namespace

IntVector sample_nonspherical(std::span<const double> cov, std::size_t dim,
                              RandomSource& rng) {
  if (cov.size() != dim * dim) {
    throw Error(Errc::kDimension, "sample_nonspherical: cov must be dim x dim");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (cov[i * dim + j] != cov[j * dim + i]) {
        throw Error(Errc::kPrecondition, "covariance is not symmetric");
      }
    }
  }
  const std::vector<double> l = cholesky(cov, dim);
  std::vector<double> g(dim);
  for (std::size_t i = 0; i < dim; i += 2) {
    double a, b;
    normal_pair(rng, a, b);
    g[i] = a;
    if (i + 1 < dim) g[i + 1] = b;
  }
  IntVector out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double y = kernels::dot(&l[i * dim], g.data(), i + 1);
    out[i] = sample_z({kRoundingWidth, y, kTailcut}, rng);
  }
  return out;
}

ModVector rerand(const IntMatrix& d, const ModVector& c, double r, double sigma,
                 RandomSource& rng) {
  const std::size_t m = d.rows(), ell = d.cols();
  if (c.size() != m) throw Error(Errc::kDimension, "rerand: c length differs");
  const double s1 = s1_upper(d);
  if (!(sigma >= s1)) {
    throw Error(Errc::kPrecondition, "rerand: sigma below s1(d)");
  }
  if (!(r >= gs_slack(static_cast<double>(std::max(m, ell))))) {
    throw Error(Errc::kPrecondition, "rerand: r below the smoothing slack");
  }
  // Covariances in variance units: width s contributes s^2 / (2 pi).
  const double two_pi = 2.0 * std::numbers::pi;
  const double target = (2.0 * r * sigma) * (2.0 * r * sigma);
  const double rounding = kRoundingWidth * kRoundingWidth;
  std::vector<double> cov(ell * ell);
  const std::vector<double> dc = to_column_major(d);
  for (std::size_t i = 0; i < ell; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double dtd = kernels::dot(&dc[i * m], &dc[j * m], m);
      double v = -r * r * dtd;
      if (i == j) v += target - rounding;
      cov[i * ell + j] = cov[j * ell + i] = v / two_pi;
    }
  }
  const IntVector w = sample_nonspherical(cov, ell, rng);
  const ModVector cd = vec_mat_mod(c, reduce_mod(d, c.q()));
  std::vector<u64> out(ell);
  for (std::size_t j = 0; j < ell; ++j) {
    out[j] = add_mod(cd[j], reduce_signed(w[j], c.q()), c.q());
  }
  return ModVector(std::move(out), c.q());
}

}  // namespace ahibet
