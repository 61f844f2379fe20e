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

#include "greenmark/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "greenmark/error.hpp"

namespace greenmark {

double z_score(std::size_t green_count, std::size_t total_scored, double gamma) {
  const double t = static_cast<double>(total_scored);
  return (static_cast<double>(green_count) - gamma * t) /
         std::sqrt(t * gamma * (1.0 - gamma));
}

DetectionReport score_sequence(std::span<const TokenId> tokens, WatermarkKey key,
                               double gamma, std::size_t vocab_size) {
  if (tokens.size() < 2)
    throw InputError("need at least 2 tokens to score, got " +
                     std::to_string(tokens.size()));
  check_partition_params(vocab_size, gamma);
  for (TokenId t : tokens)
    if (t >= vocab_size)
      throw InputError("token " + std::to_string(t) +
                       " outside vocabulary of size " +
                       std::to_string(vocab_size));

  DetectionReport report;
  report.total_scored = tokens.size() - 1;
  report.per_position_colors.reserve(report.total_scored);
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const bool green =
        partition_for(key, tokens[i - 1], vocab_size, gamma).is_green(tokens[i]);
    report.per_position_colors.push_back(green);
    report.green_count += green ? 1 : 0;
  }
  report.z = z_score(report.green_count, report.total_scored, gamma);
  return report;
}

bool decide(const DetectionReport& report, double z_threshold) noexcept {
  return report.z > z_threshold;
}

DetectionReport detect(std::span<const TokenId> tokens, WatermarkKey key,
                       double gamma, std::size_t vocab_size,
                       double z_threshold) {
  DetectionReport report = score_sequence(tokens, key, gamma, vocab_size);
  report.threshold = z_threshold;
  report.is_watermarked = decide(report, z_threshold);
  return report;
}

double empirical_threshold(std::span<const double> clean_z, double fpr) {
  if (clean_z.empty()) throw InputError("clean score list is empty");
  std::vector<double> sorted(clean_z.begin(), clean_z.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const auto rank = static_cast<std::ptrdiff_t>(std::ceil((1.0 - fpr) * n - 1e-9));
  if (rank <= 0) return -std::numeric_limits<double>::infinity();
  return sorted[static_cast<std::size_t>(
      std::min<std::ptrdiff_t>(rank, static_cast<std::ptrdiff_t>(n)) - 1)];
}

namespace {

// Mann-Whitney U / (n_w n_c) with tied ranks averaged.
double rank_auroc(std::span<const double> pos, std::span<const double> neg) {
  std::vector<std::pair<double, bool>> all;
  all.reserve(pos.size() + neg.size());
  for (double z : pos) all.emplace_back(z, true);
  for (double z : neg) all.emplace_back(z, false);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t m = i; m < j; ++m)
      if (all[m].second) pos_rank_sum += avg_rank;
    i = j;
  }
  const double np = static_cast<double>(pos.size());
  const double nn = static_cast<double>(neg.size());
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

// Max F1 over "positive iff z > t" for t = -inf and every observed score.
double best_f1_score(std::span<const double> pos, std::span<const double> neg) {
  std::vector<std::pair<double, bool>> all;
  all.reserve(pos.size() + neg.size());
  for (double z : pos) all.emplace_back(z, true);
  for (double z : neg) all.emplace_back(z, false);
  // Descending, so a prefix is exactly the set above a threshold.
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  const double total_pos = static_cast<double>(pos.size());
  double tp = total_pos;
  double fp = static_cast<double>(neg.size());
  double best = 2.0 * tp / (2.0 * tp + fp);  // t = -inf
  // Walk thresholds from the lowest score up: removing the group equal to t.
  std::size_t end = all.size();
  while (end > 0) {
    const double t = all[end - 1].first;
    while (end > 0 && all[end - 1].first == t) {
      if (all[end - 1].second) tp -= 1.0; else fp -= 1.0;
      --end;
    }
    const double fn = total_pos - tp;
    const double denom = 2.0 * tp + fp + fn;
    if (denom > 0.0) best = std::max(best, 2.0 * tp / denom);
  }
  return best;
}

}  // namespace

RocMetrics roc_metrics(std::span<const double> watermarked_z,
                       std::span<const double> clean_z,
                       std::span<const double> fpr_levels) {
  if (watermarked_z.empty() || clean_z.empty())
    throw InputError("roc_metrics needs non-empty score lists");

  RocMetrics m;
  for (double fpr : fpr_levels) {
    if (!(fpr >= 0.0 && fpr <= 1.0))
      throw InputError("FPR level outside [0, 1]: " + std::to_string(fpr));
    const double t = empirical_threshold(clean_z, fpr);
    const auto hits = std::count_if(watermarked_z.begin(), watermarked_z.end(),
                                    [t](double z) { return z > t; });
    m.tpr_at_fpr[fpr] =
        static_cast<double>(hits) / static_cast<double>(watermarked_z.size());
  }
  m.best_f1 = best_f1_score(watermarked_z, clean_z);
  m.auroc = rank_auroc(watermarked_z, clean_z);
  return m;
}

}  // namespace greenmark
