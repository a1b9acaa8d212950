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

#ifndef AHIBET_KERNELS_HPP_
#define AHIBET_KERNELS_HPP_

#include <cstddef>

// Dense double-precision inner loops behind Gram-Schmidt, Klein sampling and
// the floating LU used by integer solves.
//
// Every variant accumulates in four interleaved lanes (index i goes to lane
// i % 4), folds the lanes as (l0 + l1) + (l2 + l3) and adds the tail in index
// order, without fused multiply-add. The scalar reference and the AVX2 path
// therefore return bit-identical results, which keeps seeded sampling
// reproducible across machines.
namespace ahibet::kernels {

enum class Backend { kScalar, kAvx2 };

// Backend picked at first use: AVX2 when the CPU reports it, unless the
// environment variable AHIBET_FORCE_SCALAR is set to a non-empty value.
Backend active_backend();
const char* backend_name(Backend backend);

double dot(const double* a, const double* b, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool supported();
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2

}  // namespace ahibet::kernels

#endif  // AHIBET_KERNELS_HPP_
