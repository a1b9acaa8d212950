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

#ifndef AHIBET_ERRORS_HPP_
#define AHIBET_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ahibet {

enum class Errc {
  kDimension,
  kModulus,
  kInconsistent,
  kRankDeficient,
  kSingular,
  kNonIntegral,
  kNoiseBound,
  kPrecondition,
  kOverflow,
  kBudget,
  kParse,
  kInfeasible,
};

const char* to_string(Errc code);

// Every failure in the library surfaces as an Error carrying a code that
// tests and the CLI can branch on.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ahibet

#endif  // AHIBET_ERRORS_HPP_
