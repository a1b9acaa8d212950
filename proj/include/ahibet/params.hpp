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

#ifndef AHIBET_PARAMS_HPP_
#define AHIBET_PARAMS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "ahibet/modq.hpp"

namespace ahibet {

struct ParamSet {
  std::size_t lambda = 0;  // message and tag length in bits
  std::size_t d = 0;       // maximum depth
  std::size_t n = 0;
  u64 q = 0;
  unsigned k = 0;          // ceil(log2 q)
  std::size_t omega = 0;   // n k
  std::size_t m = 0;
  std::vector<double> sigma;  // sigma_1 .. sigma_d
  double tau = 0.0;
  double alpha = 0.0;      // r / q
  double r = 0.0;          // noise width of e_0 and e_2
  std::string profile;

  double sigma_at(std::size_t depth) const { return sigma.at(depth - 1); }
  std::size_t width(std::size_t depth) const { return m + depth * omega; }
  // 2 r tau sigma_d (m + d omega), which must stay below q / 4.
  double noise_bound() const;

  bool operator==(const ParamSet&) const = default;
};

// Width of the Gaussian trapdoor matrices R_0, R_1.
double trapdoor_width(std::size_t n);

// Expected spectral-norm bound for an m x omega trapdoor of that width.
double trapdoor_s1_estimate(std::size_t n, std::size_t m, std::size_t omega);

std::vector<std::string> profile_names();

// Instantiates the parameter constraints for a profile, growing q to the
// next prime above the requirement until the correctness inequality holds.
// Throws Errc::kPrecondition for lambda == 0, d == 0 or an unknown profile
// and Errc::kInfeasible when no prime below 2^62 works.
ParamSet derive_params(std::size_t lambda, std::size_t d, const std::string& profile);

// Throws Errc::kInconsistent naming the first violated invariant.
void validate(const ParamSet& p);

}  // namespace ahibet

#endif  // AHIBET_PARAMS_HPP_
