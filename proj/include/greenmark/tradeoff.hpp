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

#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace greenmark {

// How the trade-off objective scores similarity between the original and the
// reweighted step distribution.
enum class QualityMetric {
  kBhattacharyya,  // Bhattacharyya coefficient
  kNegKl,          // -D_KL(P || P̂)
};

std::string_view to_string(QualityMetric m) noexcept;  // "bc" / "kl"
QualityMetric parse_quality_metric(std::string_view name);

struct TradeoffQuery {
  double pg = 0.5;
  double r = 0.5;
  double omega = 0.2;
  QualityMetric metric = QualityMetric::kBhattacharyya;
};

struct TradeoffPoint {
  double t_value = 0.0;  // quality
  double w_value = 0.0;  // effectiveness
  double f_value = 0.0;  // t + omega * w
  double s_value = 0.0;  // sign-equivalent surrogate of dF/dr
};

// S is evaluated only on this interval; it diverges to -inf at r = 1.
inline constexpr double kStrengthLo = 1e-9;
inline constexpr double kStrengthHi = 1.0 - 1e-9;

// All of these throw DomainError unless pg and r lie strictly inside (0, 1).
double quality_bc(double pg, double r);
double quality_kl(double pg, double r);
double effectiveness(double pg, double r);
double quality(QualityMetric metric, double pg, double r);

// S(r) = 2 omega + d/dr T / (1 - P_G): the derivative of the objective with the
// positive (1 - P_G) factor removed.
double surrogate_slope(QualityMetric metric, double pg, double r, double omega);

// Throws DomainError on boundary pg/r or non-positive omega.
TradeoffPoint objective(const TradeoffQuery& query);

struct BisectionResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Root of a decreasing function on [lo, hi] with f(lo) > 0 > f(hi). Stops when
// |f| <= tol, the bracket collapses to adjacent doubles, or after
// max_iterations.
BisectionResult bisect_decreasing(const std::function<double(double)>& f,
                                  double lo, double hi, double tol,
                                  int max_iterations = 200);

// Maximizer r* of the objective in r, found as the zero of S.
double optimal_r(double pg, double omega,
                 QualityMetric metric = QualityMetric::kBhattacharyya,
                 double tol = 1e-12);

struct MonotonicityCheck {
  bool strictly_increasing = false;
  std::vector<std::pair<double, double>> curve;  // (pg, r*)
};

// Throws InputError if pg_grid is empty, not strictly increasing, or touches
// the boundary.
MonotonicityCheck verify_monotonicity(double omega, std::span<const double> pg_grid,
                                      QualityMetric metric);

}  // namespace greenmark
