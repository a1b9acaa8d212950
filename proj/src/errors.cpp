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

#include "ahibet/errors.hpp"

namespace ahibet {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::kDimension: return "dimension mismatch";
    case Errc::kModulus: return "modulus error";
    case Errc::kInconsistent: return "inconsistent system";
    case Errc::kRankDeficient: return "rank deficient";
    case Errc::kSingular: return "singular";
    case Errc::kNonIntegral: return "non-integral solution";
    case Errc::kNoiseBound: return "noise bound violated";
    case Errc::kPrecondition: return "precondition violated";
    case Errc::kOverflow: return "integer overflow";
    case Errc::kBudget: return "budget exceeded";
    case Errc::kParse: return "parse error";
    case Errc::kInfeasible: return "infeasible";
  }
  return "unknown";
}

}  // namespace ahibet
