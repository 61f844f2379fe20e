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

#include "greenmark/tradeoff.hpp"

#include <cmath>
#include <string>

#include "greenmark/error.hpp"

namespace greenmark {

std::string_view to_string(QualityMetric m) noexcept {
  return m == QualityMetric::kBhattacharyya ? "bc" : "kl";
}

QualityMetric parse_quality_metric(std::string_view name) {
  if (name == "bc") return QualityMetric::kBhattacharyya;
  if (name == "kl") return QualityMetric::kNegKl;
  throw ParameterError("unknown quality metric '" + std::string(name) +
                       "' (expected bc or kl)");
}

namespace {

void check_interior(double pg, double r) {
  if (!(pg > 0.0 && pg < 1.0))
    throw DomainError("P_G must lie in (0, 1), got " + std::to_string(pg));
  if (!(r > 0.0 && r < 1.0))
    throw DomainError("r must lie in (0, 1), got " + std::to_string(r));
}

// Green-token scale factor 1 + r(1 - P_G)/P_G.
double green_gain(double pg, double r) { return 1.0 + r * (1.0 - pg) / pg; }

}  // namespace

double quality_bc(double pg, double r) {
  check_interior(pg, r);
  return pg * std::sqrt(green_gain(pg, r)) + (1.0 - pg) * std::sqrt(1.0 - r);
}

double quality_kl(double pg, double r) {
  check_interior(pg, r);
  return pg * std::log1p(r * (1.0 - pg) / pg) + (1.0 - pg) * std::log1p(-r);
}

double effectiveness(double pg, double r) {
  check_interior(pg, r);
  return 2.0 * r * (1.0 - pg);
}

double quality(QualityMetric metric, double pg, double r) {
  return metric == QualityMetric::kBhattacharyya ? quality_bc(pg, r)
                                                 : quality_kl(pg, r);
}

double surrogate_slope(QualityMetric metric, double pg, double r, double omega) {
  check_interior(pg, r);
  const double gain = green_gain(pg, r);
  if (metric == QualityMetric::kBhattacharyya)
    return 2.0 * omega + 0.5 / std::sqrt(gain) - 0.5 / std::sqrt(1.0 - r);
  return 2.0 * omega + 1.0 / gain - 1.0 / (1.0 - r);
}

TradeoffPoint objective(const TradeoffQuery& q) {
  if (!(q.omega > 0.0)) throw DomainError("omega must be positive");
  TradeoffPoint p;
  p.t_value = quality(q.metric, q.pg, q.r);
  p.w_value = effectiveness(q.pg, q.r);
  p.f_value = p.t_value + q.omega * p.w_value;
  p.s_value = surrogate_slope(q.metric, q.pg, q.r, q.omega);
  return p;
}

BisectionResult bisect_decreasing(const std::function<double(double)>& f,
                                  double lo, double hi, double tol,
                                  int max_iterations) {
  BisectionResult res;
  double mid = 0.5 * (lo + hi);
  double fm = f(mid);
  for (res.iterations = 1; res.iterations < max_iterations; ++res.iterations) {
    if (std::abs(fm) <= tol) break;
    if (fm > 0.0) lo = mid; else hi = mid;
    const double next = 0.5 * (lo + hi);
    if (next == lo || next == hi) break;
    mid = next;
    fm = f(mid);
  }
  res.root = mid;
  res.residual = fm;
  return res;
}

double optimal_r(double pg, double omega, QualityMetric metric, double tol) {
  if (!(pg > 0.0 && pg < 1.0)) throw DomainError("P_G must lie in (0, 1)");
  if (!(omega > 0.0)) throw DomainError("omega must be positive");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const auto s = [&](double r) { return surrogate_slope(metric, pg, r, omega); };
  return bisect_decreasing(s, kStrengthLo, kStrengthHi, tol).root;
}

MonotonicityCheck verify_monotonicity(double omega, std::span<const double> pg_grid,
                                      QualityMetric metric) {
  if (pg_grid.empty()) throw InputError("P_G grid is empty");
  for (std::size_t i = 0; i < pg_grid.size(); ++i) {
    if (!(pg_grid[i] > 0.0 && pg_grid[i] < 1.0))
      throw InputError("P_G grid must be interior");
    if (i > 0 && !(pg_grid[i] > pg_grid[i - 1]))
      throw InputError("P_G grid must be strictly increasing");
  }
  MonotonicityCheck out;
  out.strictly_increasing = true;
  for (double pg : pg_grid) {
    const double r_star = optimal_r(pg, omega, metric);
    if (!out.curve.empty() && !(r_star > out.curve.back().second))
      out.strictly_increasing = false;
    out.curve.emplace_back(pg, r_star);
  }
  return out;
}

}  // namespace greenmark
