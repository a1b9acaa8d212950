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

#include "ahibet/kernels.hpp"

#include <cstdlib>

namespace ahibet::kernels {

namespace {

Backend select_backend() {
  const char* force = std::getenv("AHIBET_FORCE_SCALAR");
  if (force != nullptr && force[0] != '\0') return Backend::kScalar;
  return avx2::supported() ? Backend::kAvx2 : Backend::kScalar;
}

using DotFn = double (*)(const double*, const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);

struct Table {
  Backend backend;
  DotFn dot;
  AxpyFn axpy;
};

const Table& table() {
  static const Table t = [] {
    Backend b = select_backend();
    if (b == Backend::kAvx2) return Table{b, &avx2::dot, &avx2::axpy};
    return Table{b, &scalar::dot, &scalar::axpy};
  }();
  return t;
}

}  // namespace

Backend active_backend() { return table().backend; }

const char* backend_name(Backend backend) {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

double dot(const double* a, const double* b, std::size_t n) {
  return table().dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  table().axpy(alpha, x, y, n);
}

}  // namespace ahibet::kernels
