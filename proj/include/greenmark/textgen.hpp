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

#include "greenmark/partition.hpp"
#include "greenmark/reweight.hpp"
#include "greenmark/splitmix64.hpp"
#include "greenmark/strength.hpp"

namespace greenmark {

enum class LmKind {
  kDirichlet,  // rows drawn from a symmetric Dirichlet(entropy_param)
  kChain,      // every row is a point mass: a deterministic successor map
};

// Order-0 (one row) or order-1 (one row per previous token) table-driven
// language model. Stands in for a real LLM's next-token distribution.
struct SyntheticLM {
  std::size_t vocab_size = 0;
  int order = 1;
  double entropy_param = 1.0;
  std::uint64_t seed = 0;
  LmKind kind = LmKind::kDirichlet;
  std::vector<TokenDistribution> table;

  const TokenDistribution& next(TokenId prev) const {
    return order == 0 ? table.front() : table[prev];
  }
};

// Throws ParameterError for vocab_size < 2, order not in {0, 1}, or
// non-positive entropy_param.
SyntheticLM build_lm(std::size_t vocab_size, int order, double entropy_param,
                     std::uint64_t seed);

// Order-1 LM whose rows are point masses on a pseudorandom successor.
SyntheticLM build_chain_lm(std::size_t vocab_size, std::uint64_t seed);

// One symmetric Dirichlet(alpha) draw of length n.
std::vector<double> sample_dirichlet(std::size_t n, double alpha, SplitMix64& rng);

double entropy_nats(const TokenDistribution& dist);

struct SamplerConfig {
  double temperature = 1.0;
  double top_p = 1.0;

  friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
  void validate() const;
};

// Temperature on log-probabilities, then nucleus truncation (ties broken
// toward the lower token id) and renormalization.
TokenDistribution transform(const TokenDistribution& dist, const SamplerConfig& cfg);

// Inverse-CDF categorical draw; zero-probability tokens are never returned.
TokenId sample_token(const TokenDistribution& dist, SplitMix64& rng);

enum class WatermarkMethod { kNone, kMorphMark, kKgw };

struct WatermarkSpec {
  WatermarkMethod method = WatermarkMethod::kMorphMark;
  StrengthPolicy policy = StrengthPolicy::exp();
  KgwConfig kgw;
  double gamma = 0.5;
  WatermarkKey key{0x9E3779B97F4A7C15ULL};

  friend bool operator==(const WatermarkSpec&, const WatermarkSpec&) = default;
};

struct GenerationTrace {
  std::vector<TokenId> tokens;
  std::vector<double> pg_per_step;
  // Applied strength per step. For KGW this is the equivalent strength; empty
  // when no watermark is applied.
  std::vector<double> r_per_step;
};

// Watermarked generation. Each step: LM row for the previous token, sampler
// transform, partition keyed by the previous token, P_G, strength or KGW
// boost, categorical draw. The first step is keyed by the last prompt token.
GenerationTrace generate(const SyntheticLM& lm, std::span<const TokenId> prompt,
                         std::size_t length, const WatermarkSpec& wm,
                         const SamplerConfig& cfg, std::uint64_t rng_seed);

GenerationTrace generate(const SyntheticLM& lm, std::span<const TokenId> prompt,
                         std::size_t length, WatermarkKey key, double gamma,
                         const StrengthPolicy& policy, const SamplerConfig& cfg,
                         std::uint64_t rng_seed);

// Unwatermarked prompt: a uniform first token followed by LM samples.
std::vector<TokenId> sample_prompt(const SyntheticLM& lm, std::size_t length,
                                   SplitMix64& rng);

// Normalized histogram of every P_G in the traces over `bins` equal-width bins
// on [0, 1]; P_G = 1 lands in the last bin. Throws InputError if there is
// nothing to count or bins == 0.
std::vector<double> pg_histogram(std::span<const GenerationTrace> traces,
                                 std::size_t bins);

// Mean per-step D_KL(P || P̂) of a trace, from its P_G and r columns.
double mean_kl_distortion(const GenerationTrace& trace);

}  // namespace greenmark
