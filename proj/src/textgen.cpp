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

#include "greenmark/textgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "greenmark/error.hpp"
#include "greenmark/tradeoff.hpp"

namespace greenmark {

namespace {

double standard_normal(SplitMix64& rng) {
  const double u1 = rng.uniform_open0();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// log of a Gamma(alpha, 1) variate (Marsaglia-Tsang). Working in logs keeps
// tiny alpha from underflowing to exact zeros.
double log_gamma_variate(double alpha, SplitMix64& rng) {
  if (alpha < 1.0) {
    const double boost = std::log(rng.uniform_open0()) / alpha;
    return log_gamma_variate(alpha + 1.0, rng) + boost;
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = standard_normal(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform_open0();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
      return std::log(d) + std::log(v);
  }
}

}  // namespace

std::vector<double> sample_dirichlet(std::size_t n, double alpha, SplitMix64& rng) {
  std::vector<double> logs(n);
  for (double& l : logs) l = log_gamma_variate(alpha, rng);
  const double top = *std::max_element(logs.begin(), logs.end());
  for (double& l : logs) l = std::exp(l - top);
  normalize(logs);
  return logs;
}

SyntheticLM build_lm(std::size_t vocab_size, int order, double entropy_param,
                     std::uint64_t seed) {
  if (vocab_size < 2) throw ParameterError("vocab_size must be at least 2");
  if (order != 0 && order != 1) throw ParameterError("order must be 0 or 1");
  if (!(entropy_param > 0.0))
    throw ParameterError("entropy_param must be positive");

  SyntheticLM lm{vocab_size, order, entropy_param, seed, LmKind::kDirichlet, {}};
  const std::size_t rows = order == 0 ? 1 : vocab_size;
  lm.table.reserve(rows);
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < rows; ++i)
    lm.table.push_back({sample_dirichlet(vocab_size, entropy_param, rng)});
  return lm;
}

SyntheticLM build_chain_lm(std::size_t vocab_size, std::uint64_t seed) {
  if (vocab_size < 2) throw ParameterError("vocab_size must be at least 2");
  SyntheticLM lm{vocab_size, 1, 0.0, seed, LmKind::kChain, {}};
  lm.table.reserve(vocab_size);
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < vocab_size; ++i)
    lm.table.push_back(TokenDistribution::point_mass(
        vocab_size, static_cast<TokenId>(rng.below(vocab_size))));
  return lm;
}

double entropy_nats(const TokenDistribution& dist) {
  double h = 0.0;
  for (double p : dist.probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

void SamplerConfig::validate() const {
  if (!(temperature > 0.0)) throw ParameterError("temperature must be positive");
  if (!(top_p > 0.0 && top_p <= 1.0))
    throw ParameterError("top_p must lie in (0, 1]");
}

TokenDistribution transform(const TokenDistribution& dist, const SamplerConfig& cfg) {
  cfg.validate();
  TokenDistribution out = dist;
  if (cfg.temperature != 1.0) {
    double top = -INFINITY;
    for (double p : dist.probs)
      if (p > 0.0) top = std::max(top, std::log(p));
    for (double& p : out.probs)
      p = p > 0.0 ? std::exp((std::log(p) - top) / cfg.temperature) : 0.0;
    normalize(out.probs);
  }
  if (cfg.top_p < 1.0) {
    std::vector<TokenId> order(out.size());
    std::iota(order.begin(), order.end(), TokenId{0});
    std::stable_sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
      return out.probs[a] > out.probs[b];
    });
    double cum = 0.0;
    std::size_t keep = 0;
    while (keep < order.size()) {
      cum += out.probs[order[keep++]];
      if (cum >= cfg.top_p - 1e-12) break;
    }
    for (std::size_t i = keep; i < order.size(); ++i) out.probs[order[i]] = 0.0;
    normalize(out.probs);
  }
  return out;
}

TokenId sample_token(const TokenDistribution& dist, SplitMix64& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist.probs[i] <= 0.0) continue;
    cum += dist.probs[i];
    last_positive = i;
    if (u < cum) return static_cast<TokenId>(i);
  }
  return static_cast<TokenId>(last_positive);
}

GenerationTrace generate(const SyntheticLM& lm, std::span<const TokenId> prompt,
                         std::size_t length, const WatermarkSpec& wm,
                         const SamplerConfig& cfg, std::uint64_t rng_seed) {
  if (prompt.empty()) throw InputError("prompt must be non-empty");
  if (length < 1) throw InputError("length must be at least 1");
  check_partition_params(lm.vocab_size, wm.gamma);
  if (wm.method == WatermarkMethod::kMorphMark) wm.policy.validate();
  cfg.validate();

  GenerationTrace trace;
  trace.tokens.reserve(length);
  trace.pg_per_step.reserve(length);
  if (wm.method != WatermarkMethod::kNone) trace.r_per_step.reserve(length);

  SplitMix64 rng(rng_seed);
  TokenId prev = prompt.back();
  for (std::size_t step = 0; step < length; ++step) {
    const TokenDistribution dist = transform(lm.next(prev), cfg);
    const GreenRedPartition part =
        partition_for(wm.key, prev, lm.vocab_size, wm.gamma);
    const double pg = green_mass(dist, part);
    trace.pg_per_step.push_back(pg);

    TokenId tok = 0;
    switch (wm.method) {
      case WatermarkMethod::kNone:
        tok = sample_token(dist, rng);
        break;
      case WatermarkMethod::kMorphMark: {
        const double r = strength(wm.policy, pg);
        trace.r_per_step.push_back(r);
        tok = sample_token(morphmark_reweight(dist, part, r), rng);
        break;
      }
      case WatermarkMethod::kKgw:
        trace.r_per_step.push_back(kgw_equivalent_strength(pg, wm.kgw.delta));
        tok = sample_token(kgw_reweight(dist, part, wm.kgw), rng);
        break;
    }
    trace.tokens.push_back(tok);
    prev = tok;
  }
  return trace;
}

GenerationTrace generate(const SyntheticLM& lm, std::span<const TokenId> prompt,
                         std::size_t length, WatermarkKey key, double gamma,
                         const StrengthPolicy& policy, const SamplerConfig& cfg,
                         std::uint64_t rng_seed) {
  WatermarkSpec wm;
  wm.method = WatermarkMethod::kMorphMark;
  wm.policy = policy;
  wm.gamma = gamma;
  wm.key = key;
  return generate(lm, prompt, length, wm, cfg, rng_seed);
}

std::vector<TokenId> sample_prompt(const SyntheticLM& lm, std::size_t length,
                                   SplitMix64& rng) {
  std::vector<TokenId> prompt;
  if (length == 0) return prompt;
  prompt.reserve(length);
  prompt.push_back(static_cast<TokenId>(rng.below(lm.vocab_size)));
  while (prompt.size() < length)
    prompt.push_back(sample_token(lm.next(prompt.back()), rng));
  return prompt;
}

std::vector<double> pg_histogram(std::span<const GenerationTrace> traces,
                                 std::size_t bins) {
  if (bins == 0) throw InputError("histogram needs at least one bin");
  std::vector<double> hist(bins, 0.0);
  double total = 0.0;
  for (const auto& t : traces)
    for (double pg : t.pg_per_step) {
      const auto b = std::min(bins - 1, static_cast<std::size_t>(
                                            std::max(0.0, pg) * static_cast<double>(bins)));
      hist[b] += 1.0;
      total += 1.0;
    }
  if (total == 0.0) throw InputError("no P_G values to histogram");
  for (double& h : hist) h /= total;
  return hist;
}

double mean_kl_distortion(const GenerationTrace& trace) {
  if (trace.r_per_step.empty() || trace.pg_per_step.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < trace.pg_per_step.size(); ++i) {
    const double pg = trace.pg_per_step[i];
    const double r = trace.r_per_step[i];
    if (pg <= kDegenerateMassTol || pg >= 1.0 - kDegenerateMassTol || r <= 0.0)
      continue;
    sum -= quality_kl(pg, std::min(r, kStrengthHi));
  }
  return sum / static_cast<double>(trace.pg_per_step.size());
}

}  // namespace greenmark
