// Copyright 2026 The greenmark Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "greenmark/strength.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "greenmark/error.hpp"

namespace greenmark {

std::string_view to_string(StrengthKind kind) noexcept {
  switch (kind) {
    case StrengthKind::kLinear: return "linear";
    case StrengthKind::kExp: return "exp";
    case StrengthKind::kLog: return "log";
    case StrengthKind::kFixed: return "fixed";
  }
  return "?";
}

StrengthKind parse_strength_kind(std::string_view name) {
  if (name == "linear") return StrengthKind::kLinear;
  if (name == "exp") return StrengthKind::kExp;
  if (name == "log") return StrengthKind::kLog;
  if (name == "fixed") return StrengthKind::kFixed;
  throw ParameterError("unknown strength policy '" + std::string(name) + "'");
}

StrengthPolicy StrengthPolicy::linear(double k, double p0) {
  return {StrengthKind::kLinear, k, p0, kDefaultEps, 0.5};
}
StrengthPolicy StrengthPolicy::exp(double k, double p0) {
  return {StrengthKind::kExp, k, p0, kDefaultEps, 0.5};
}
StrengthPolicy StrengthPolicy::log(double k, double p0) {
  return {StrengthKind::kLog, k, p0, kDefaultEps, 0.5};
}
StrengthPolicy StrengthPolicy::fixed(double r, double p0) {
  return {StrengthKind::kFixed, 1.0, p0, kDefaultEps, r};
}

void StrengthPolicy::validate() const {
  if (!(eps > 0.0 && eps <= 1e-6))
    throw ParameterError("eps must lie in (0, 1e-6]");
  if (!(p0 >= 0.0 && p0 < 1.0))
    throw ParameterError("p0 must lie in [0, 1)");
  if (!(k > 0.0)) throw ParameterError("k must be positive");
  if (kind == StrengthKind::kFixed && !(fixed_r > 0.0 && fixed_r < 1.0))
    throw ParameterError("fixed_r must lie in (0, 1)");
}

double strength(const StrengthPolicy& policy, double pg) {
  if (!(pg >= 0.0 && pg <= 1.0))
    throw DomainError("P_G must lie in [0, 1], got " + std::to_string(pg));
  if (pg <= policy.p0) return policy.eps;

  double z = 0.0;
  switch (policy.kind) {
    case StrengthKind::kLinear: z = policy.k * pg; break;
    case StrengthKind::kExp: z = std::expm1(policy.k * pg); break;
    case StrengthKind::kLog: z = std::log1p(policy.k * pg); break;
    case StrengthKind::kFixed: z = policy.fixed_r; break;
  }
  return std::clamp(z, policy.eps, 1.0 - policy.eps);
}

}  // namespace greenmark
