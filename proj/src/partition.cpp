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

#include "greenmark/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "greenmark/error.hpp"
#include "greenmark/splitmix64.hpp"

namespace greenmark {

std::size_t GreenRedPartition::green_count() const {
  return static_cast<std::size_t>(
      std::count(green_mask.begin(), green_mask.end(), std::uint8_t{1}));
}

std::vector<TokenId> GreenRedPartition::green_indices() const {
  std::vector<TokenId> out;
  for (std::size_t i = 0; i < green_mask.size(); ++i)
    if (green_mask[i]) out.push_back(static_cast<TokenId>(i));
  return out;
}

std::uint64_t derive_seed(WatermarkKey key, TokenId prev_token) noexcept {
  return splitmix64(key.value ^
                    (static_cast<std::uint64_t>(prev_token) * kGoldenGamma));
}

void check_partition_params(std::size_t vocab_size, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ParameterError("gamma must lie in (0, 1), got " +
                         std::to_string(gamma));
  if (vocab_size < 2)
    throw ParameterError("vocab_size must be at least 2, got " +
                         std::to_string(vocab_size));
}

std::size_t green_list_size(std::size_t vocab_size, double gamma) {
  check_partition_params(vocab_size, gamma);
  return static_cast<std::size_t>(
      std::floor(gamma * static_cast<double>(vocab_size) + 1e-9));
}

GreenRedPartition partition(std::uint64_t seed, std::size_t vocab_size,
                            double gamma) {
  const std::size_t greens = green_list_size(vocab_size, gamma);

  std::vector<TokenId> perm(vocab_size);
  std::iota(perm.begin(), perm.end(), TokenId{0});
  SplitMix64 rng(seed);
  // Only the prefix is needed, so stop the forward shuffle after `greens` swaps.
  for (std::size_t i = 0; i < greens; ++i) {
    const std::size_t j = i + rng.below(vocab_size - i);
    std::swap(perm[i], perm[j]);
  }

  GreenRedPartition part;
  part.vocab_size = vocab_size;
  part.gamma = gamma;
  part.green_mask.assign(vocab_size, 0);
  for (std::size_t i = 0; i < greens; ++i) part.green_mask[perm[i]] = 1;
  return part;
}

GreenRedPartition partition_for(WatermarkKey key, TokenId prev_token,
                                std::size_t vocab_size, double gamma) {
  if (prev_token >= vocab_size)
    throw InputError("previous token " + std::to_string(prev_token) +
                     " outside vocabulary of size " +
                     std::to_string(vocab_size));
  return partition(derive_seed(key, prev_token), vocab_size, gamma);
}

}  // namespace greenmark
