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

#include "ahibet/params.hpp"

#include <cmath>
#include <numbers>

#include "ahibet/errors.hpp"
#include "ahibet/gaussian.hpp"

namespace ahibet {

namespace {

struct Profile {
  const char* name;
  std::size_t n;
  unsigned start_bits;
  std::size_t extra;  // m = nk + extra, or 2nk when extra == 0
};

constexpr Profile kProfiles[] = {
    {"toy-small", 4, 26, 0},
    {"toy-medium", 4, 26, 16},
    {"asymptotic-demo", 8, 30, 0},
};

// Smallest prime q >= from with q == 1 (mod 4). For such q the FRD modulus
// search ends at a binomial x^n + c after a few candidates (n a power of two).
u64 next_modulus(u64 from) {
  u64 q = next_prime(from);
  while (q % 4 != 1) q = next_prime(q + 1);
  return q;
}

const Profile& find_profile(const std::string& name) {
  for (const Profile& p : kProfiles) {
    if (name == p.name) return p;
  }
  throw Error(Errc::kPrecondition, "unknown profile '" + name + "'");
}

std::size_t width_m(const Profile& prof, std::size_t nk) {
  return prof.extra == 0 ? 2 * nk : nk + prof.extra;
}

// Everything except q follows from (profile, lambda, d, q).
ParamSet instantiate(const Profile& prof, std::size_t lambda, std::size_t d, u64 q) {
  ParamSet p;
  p.lambda = lambda;
  p.d = d;
  p.n = prof.n;
  p.q = q;
  p.k = ceil_log2(q);
  p.omega = p.n * p.k;
  p.m = width_m(prof, p.omega);
  p.profile = prof.name;
  // sigma_1 meets the right-sampling minimum 5 s1(R) slack(n) for the
  // expected s1(R); each later level covers the Gram-Schmidt bound of the
  // previous level's keys, sigma_{l-1} sqrt(m + (l-1) omega), with slack.
  const double s1 = trapdoor_s1_estimate(p.n, p.m, p.omega);
  p.sigma.push_back(std::ceil(5.0 * s1 * gs_slack(static_cast<double>(p.n))));
  for (std::size_t l = 2; l <= d; ++l) {
    const double prev = p.sigma.back();
    p.sigma.push_back(std::ceil(prev * std::sqrt(static_cast<double>(p.width(l - 1))) *
                                gs_slack(static_cast<double>(p.width(l)))));
  }
  p.tau = std::max(std::ceil(std::pow(static_cast<double>(p.m), 1.5) / 64.0), std::ceil(s1 + 1.0));
  // Strictly above 2 sqrt(n), as the LWE hardness condition requires.
  p.r = std::floor(2.0 * std::sqrt(static_cast<double>(p.n))) + 1.0;
  p.alpha = p.r / static_cast<double>(q);
  return p;
}

}  // namespace

double ParamSet::noise_bound() const {
  return 2.0 * r * tau * sigma.back() * static_cast<double>(m + d * omega);
}

double trapdoor_width(std::size_t n) { return gs_slack(static_cast<double>(n)); }

double trapdoor_s1_estimate(std::size_t n, std::size_t m, std::size_t omega) {
  const double sd = trapdoor_width(n) / std::sqrt(2.0 * std::numbers::pi);
  return 1.25 * sd * (std::sqrt(static_cast<double>(m)) + std::sqrt(static_cast<double>(omega)));
}

std::vector<std::string> profile_names() {
  std::vector<std::string> out;
  for (const Profile& p : kProfiles) out.emplace_back(p.name);
  return out;
}

ParamSet derive_params(std::size_t lambda, std::size_t d, const std::string& profile) {
  if (lambda == 0) throw Error(Errc::kPrecondition, "lambda must be positive");
  if (d == 0) throw Error(Errc::kPrecondition, "depth must be at least 1");
  const Profile& prof = find_profile(profile);
  u64 q = next_modulus(u64{1} << prof.start_bits);
  constexpr u64 kLimit = u64{1} << 62;
  while (true) {
    const ParamSet p = instantiate(prof, lambda, d, q);
    const double need = 4.0 * p.noise_bound();
    if (need < static_cast<double>(q)) {
      validate(p);
      return p;
    }
    if (!(need < static_cast<double>(kLimit))) break;
    q = next_modulus(std::max(q + 1, static_cast<u64>(need) + 1));
    if (q >= kLimit) break;
  }
  throw Error(Errc::kInfeasible, "profile " + profile + " has no modulus below 2^62");
}

void validate(const ParamSet& p) {
  auto fail = [](const std::string& what) { throw Error(Errc::kInconsistent, "invalid parameters: " + what); };
  if (p.lambda == 0) fail("lambda must be positive");
  if (p.d == 0) fail("depth must be at least 1");
  if (p.n == 0) fail("n must be positive");
  if (p.q < 3 || !is_prime(p.q)) fail("q must be an odd prime");
  if (p.q % 4 != 1) fail("q must be 1 mod 4");
  if (p.k != ceil_log2(p.q)) fail("k must equal ceil(log2 q)");
  if (p.omega != p.n * p.k) fail("omega must equal n k");
  if (p.m < p.n * p.k) fail("m must be at least n k");
  if (p.sigma.size() != p.d) fail("sigma ladder must have d entries");
  for (std::size_t i = 0; i < p.sigma.size(); ++i) {
    if (!(p.sigma[i] > 0.0)) fail("sigma entries must be positive");
    if (i > 0 && p.sigma[i] < p.sigma[i - 1]) fail("sigma ladder must be monotone");
  }
  if (!(p.tau > 0.0) || !(p.r > 0.0)) fail("tau and r must be positive");
  if (std::abs(p.alpha * static_cast<double>(p.q) - p.r) > 1e-9 * p.r) fail("alpha must equal r / q");
  if (!(4.0 * p.noise_bound() < static_cast<double>(p.q))) {
    fail("2 r tau sigma_d (m + d omega) must stay below q/4");
  }
}

}  // namespace ahibet
