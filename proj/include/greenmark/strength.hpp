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

#pragma once

#include <string_view>

namespace greenmark {

enum class StrengthKind { kLinear, kExp, kLog, kFixed };

std::string_view to_string(StrengthKind kind) noexcept;
// Accepts "linear", "exp", "log", "fixed"; throws ParameterError otherwise.
StrengthKind parse_strength_kind(std::string_view name);

// Adaptive strength rule P_G -> r. Below the watermarking threshold p0 the
// strength collapses to eps; above it the growth function z(P_G) is clamped
// into [eps, 1 - eps].
struct StrengthPolicy {
  StrengthKind kind = StrengthKind::kExp;
  double k = 1.30;
  double p0 = 0.15;
  double eps = 1e-10;
  double fixed_r = 0.5;  // kFixed only

  friend bool operator==(const StrengthPolicy&,
                         const StrengthPolicy&) = default;

  // Operating-point defaults for each growth function.
  static StrengthPolicy linear(double k = 1.55, double p0 = 0.15);
  static StrengthPolicy exp(double k = 1.30, double p0 = 0.15);
  static StrengthPolicy log(double k = 2.15, double p0 = 0.15);
  static StrengthPolicy fixed(double r, double p0 = 0.0);

  // Throws ParameterError on eps outside (0, 1e-6], p0 outside [0, 1),
  // non-positive k, or fixed_r outside (0, 1).
  void validate() const;
};

inline constexpr double kDefaultKLinear = 1.55;
inline constexpr double kDefaultKExp = 1.30;
inline constexpr double kDefaultKLog = 2.15;
inline constexpr double kDefaultP0 = 0.15;
inline constexpr double kDefaultEps = 1e-10;

// r = phi(pg). Throws DomainError if pg is outside [0, 1].
double strength(const StrengthPolicy& policy, double pg);

}  // namespace greenmark
