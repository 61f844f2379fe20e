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

#include "greenmark/reweight.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "greenmark/error.hpp"

namespace greenmark {

void TokenDistribution::validate() const {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw InputError("negative or NaN probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InputError("probabilities sum to " + std::to_string(sum));
}

TokenDistribution TokenDistribution::uniform(std::size_t n) {
  return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

TokenDistribution TokenDistribution::point_mass(std::size_t n, TokenId token) {
  TokenDistribution d{std::vector<double>(n, 0.0)};
  d.probs.at(token) = 1.0;
  return d;
}

void normalize(std::vector<double>& probs) {
  const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (!(sum > 0.0)) throw InputError("cannot normalize a zero-mass vector");
  for (double& p : probs) p /= sum;
}

namespace {

void check_shape(const TokenDistribution& dist, const GreenRedPartition& part) {
  if (dist.size() != part.green_mask.size())
    throw ShapeError("distribution has " + std::to_string(dist.size()) +
                     " entries but partition covers " +
                     std::to_string(part.green_mask.size()));
}

}  // namespace

double green_mass(const TokenDistribution& dist, const GreenRedPartition& part) {
  check_shape(dist, part);
  double pg = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (part.green_mask[i]) pg += dist.probs[i];
  return std::clamp(pg, 0.0, 1.0);
}

TokenDistribution morphmark_reweight(const TokenDistribution& dist,
                                     const GreenRedPartition& part, double r) {
  if (!(r > 0.0 && r < 1.0))
    throw DomainError("strength r must lie in (0, 1), got " + std::to_string(r));
  const double pg = green_mass(dist, part);
  if (pg <= kDegenerateMassTol || pg >= 1.0 - kDegenerateMassTol) return dist;

  const double green_scale = 1.0 + r * (1.0 - pg) / pg;
  const double red_scale = 1.0 - r;
  TokenDistribution out{dist.probs};
  for (std::size_t i = 0; i < out.size(); ++i)
    out.probs[i] *= part.green_mask[i] ? green_scale : red_scale;
  normalize(out.probs);
  return out;
}

TokenDistribution kgw_reweight(const TokenDistribution& dist,
                               const GreenRedPartition& part,
                               const KgwConfig& cfg) {
  if (!(cfg.delta >= 0.0)) throw ParameterError("delta must be non-negative");
  check_shape(dist, part);
  const double boost = std::exp(cfg.delta);
  TokenDistribution out{dist.probs};
  for (std::size_t i = 0; i < out.size(); ++i)
    if (part.green_mask[i]) out.probs[i] *= boost;
  normalize(out.probs);
  return out;
}

double kgw_equivalent_strength(double pg, double delta) {
  if (pg <= kDegenerateMassTol || pg >= 1.0 - kDegenerateMassTol) return 0.0;
  // (P̂_G - P_G) / (1 - P_G) with P̂_G = pg e^d / (pg e^d + 1 - pg)
  const double boost = std::expm1(delta);
  return pg * boost / (pg * boost + 1.0);
}

}  // namespace greenmark
