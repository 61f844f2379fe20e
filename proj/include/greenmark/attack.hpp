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
#include <string>
#include <string_view>
#include <vector>

#include "greenmark/partition.hpp"

namespace greenmark {

enum class AttackKind { kSubstitute, kDelete, kParaphrase };

std::string_view to_string(AttackKind kind) noexcept;
AttackKind parse_attack_kind(std::string_view name);

struct AttackSpec {
  AttackKind kind = AttackKind::kSubstitute;
  double rate = 0.3;
  std::uint64_t rng_seed = 0;
  // kParaphrase only.
  std::string endpoint;
  int timeout_ms = 10000;
  int retries = 2;

  friend bool operator==(const AttackSpec&, const AttackSpec&) = default;
  // Short label such as "substitute0.3", used as a condition name.
  std::string label() const;
};

// Number of positions an attack at `rate` touches: round(rate * n), halves
// rounded away from zero.
std::size_t attacked_count(std::size_t n, double rate);

// Replaces attacked_count positions, chosen without replacement, by uniform
// token ids different from the original. Throws ParameterError for rate
// outside [0, 1] or vocab_size < 2.
std::vector<TokenId> substitute(std::span<const TokenId> tokens, double rate,
                                std::uint64_t rng_seed, std::size_t vocab_size);

// Removes attacked_count positions, preserving order. rate must lie in [0, 1).
std::vector<TokenId> delete_tokens(std::span<const TokenId> tokens, double rate,
                                   std::uint64_t rng_seed);

struct ParaphraseEndpoint {
  std::string scheme_host_port;  // e.g. "http://127.0.0.1:8080"
  std::string path = "/";
};

// Splits "http://host:port/path". Throws AttackUnavailable on anything else.
ParaphraseEndpoint parse_endpoint(std::string_view descriptor);

// POSTs {"text_tokens": [...]} and expects the same shape back. Transport
// failures are retried `retries` times; persistent failure or a malformed
// reply raises AttackUnavailable.
std::vector<TokenId> paraphrase(std::span<const TokenId> tokens,
                                std::string_view endpoint_descriptor,
                                int timeout_ms = 10000, int retries = 2);

// Dispatches on spec.kind. Per-sequence seeds are derived from spec.rng_seed
// and sequence_index so a corpus can be attacked deterministically.
std::vector<TokenId> apply_attack(std::span<const TokenId> tokens,
                                  const AttackSpec& spec, std::size_t vocab_size,
                                  std::uint64_t sequence_index = 0);

}  // namespace greenmark
