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
#include <map>
#include <span>
#include <vector>

#include "greenmark/partition.hpp"

namespace greenmark {

inline constexpr double kDefaultZThreshold = 2.326;

// Outcome of the green-count z-test. per_position_colors[i] is the color of
// token i + 1 under the list keyed by token i; position 0 is never scored.
struct DetectionReport {
  std::size_t total_scored = 0;
  std::size_t green_count = 0;
  double z = 0.0;
  double threshold = kDefaultZThreshold;
  bool is_watermarked = false;
  std::vector<bool> per_position_colors;

  friend bool operator==(const DetectionReport&,
                         const DetectionReport&) = default;
};

// (green - gamma T) / sqrt(T gamma (1 - gamma)).
double z_score(std::size_t green_count, std::size_t total_scored, double gamma);

// Colors and counts positions 1..n-1. The decision fields are left at their
// defaults; see decide(). Throws InputError for sequences shorter than 2 or
// tokens outside the vocabulary.
DetectionReport score_sequence(std::span<const TokenId> tokens, WatermarkKey key,
                               double gamma, std::size_t vocab_size);

bool decide(const DetectionReport& report, double z_threshold) noexcept;

// score_sequence followed by decide(), with the threshold recorded.
DetectionReport detect(std::span<const TokenId> tokens, WatermarkKey key,
                       double gamma, std::size_t vocab_size,
                       double z_threshold = kDefaultZThreshold);

struct RocMetrics {
  std::map<double, double> tpr_at_fpr;
  double best_f1 = 0.0;
  double auroc = 0.5;
};

// Threshold that the clean scores exceed at rate at most `fpr`: the
// ceil((1 - fpr) n)-th smallest clean score.
double empirical_threshold(std::span<const double> clean_z, double fpr);

// Throws InputError if either list is empty or an FPR level is outside [0, 1].
RocMetrics roc_metrics(std::span<const double> watermarked_z,
                       std::span<const double> clean_z,
                       std::span<const double> fpr_levels);

}  // namespace greenmark
