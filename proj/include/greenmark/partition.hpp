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
#include <cstdint>
#include <span>
#include <vector>

namespace greenmark {

using TokenId = std::uint32_t;

struct WatermarkKey {
  std::uint64_t value = 0;

  friend constexpr bool operator==(WatermarkKey, WatermarkKey) = default;
};

// Green/red split of a vocabulary for one generation position.
struct GreenRedPartition {
  std::size_t vocab_size = 0;
  double gamma = 0.5;
  std::vector<std::uint8_t> green_mask;  // 1 = green

  bool is_green(TokenId token) const { return green_mask[token] != 0; }
  std::size_t green_count() const;
  // Ascending list of green token ids.
  std::vector<TokenId> green_indices() const;
};

std::uint64_t derive_seed(WatermarkKey key, TokenId prev_token) noexcept;

// Number of green tokens for (vocab_size, gamma): floor(gamma * vocab_size),
// with a 1e-9 allowance so decimal gammas round the way the rational would.
std::size_t green_list_size(std::size_t vocab_size, double gamma);

// Throws ParameterError unless 0 < gamma < 1 and vocab_size >= 2.
void check_partition_params(std::size_t vocab_size, double gamma);

// Green set = first floor(gamma * V) entries of a Fisher-Yates permutation of
// [0, V) driven by SplitMix64(seed).
GreenRedPartition partition(std::uint64_t seed, std::size_t vocab_size,
                            double gamma);

// Green list in force at the position following `prev_token`.
GreenRedPartition partition_for(WatermarkKey key, TokenId prev_token,
                                std::size_t vocab_size, double gamma);

}  // namespace greenmark
