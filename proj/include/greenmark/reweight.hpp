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

#include <cstddef>
#include <span>
#include <vector>

#include "greenmark/partition.hpp"

namespace greenmark {

// Next-token probability vector. Most functions accept unvalidated vectors and
// call validate() at their boundary.
struct TokenDistribution {
  std::vector<double> probs;

  std::size_t size() const noexcept { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }

  // Throws InputError on negative entries or |sum - 1| > 1e-9.
  void validate() const;

  static TokenDistribution uniform(std::size_t n);
  static TokenDistribution point_mass(std::size_t n, TokenId token);
};

// Divides by the computed sum. Throws InputError if the sum is not positive.
void normalize(std::vector<double>& probs);

struct KgwConfig {
  double delta = 1.25;

  friend bool operator==(const KgwConfig&, const KgwConfig&) = default;
};

inline constexpr double kDegenerateMassTol = 1e-12;

// Cumulative green probability P_G. Throws ShapeError on length mismatch.
double green_mass(const TokenDistribution& dist, const GreenRedPartition& part);

// Moves r(1 - P_G) of probability from red to green, proportionally within
// each list. A distribution with P_G within 1e-12 of 0 or 1 is returned
// unchanged. Throws DomainError unless 0 < r < 1.
TokenDistribution morphmark_reweight(const TokenDistribution& dist,
                                     const GreenRedPartition& part, double r);

// Multiplies green probabilities by e^delta and renormalizes.
TokenDistribution kgw_reweight(const TokenDistribution& dist,
                               const GreenRedPartition& part,
                               const KgwConfig& cfg);

// Strength r for which morphmark_reweight reproduces kgw_reweight on a list
// with green mass pg: the KGW green mass gain as a fraction of the red mass.
double kgw_equivalent_strength(double pg, double delta);

}  // namespace greenmark
