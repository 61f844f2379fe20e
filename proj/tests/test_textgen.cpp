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

#include <doctest.h>

#include <cmath>

#include "greenmark/detect.hpp"
#include "greenmark/error.hpp"
#include "greenmark/experiment.hpp"
#include "greenmark/textgen.hpp"
#include "greenmark/tradeoff.hpp"
#include "oracle/oracles.hpp"

using namespace greenmark;

TEST_CASE("build_lm rows are valid and reproducible") {
  const auto a = build_lm(50, 1, 0.5, 9);
  const auto b = build_lm(50, 1, 0.5, 9);
  REQUIRE(a.table.size() == 50);
  for (std::size_t i = 0; i < a.table.size(); ++i) {
    CHECK_NOTHROW(a.table[i].validate());
    CHECK(a.table[i].probs == b.table[i].probs);
  }
  CHECK(build_lm(50, 0, 0.5, 9).table.size() == 1);
  CHECK(build_lm(50, 1, 0.5, 10).table[0].probs != a.table[0].probs);
  CHECK_THROWS_AS(build_lm(1, 1, 1.0, 0), ParameterError);
  CHECK_THROWS_AS(build_lm(10, 2, 1.0, 0), ParameterError);
  CHECK_THROWS_AS(build_lm(10, 1, 0.0, 0), ParameterError);
}

TEST_CASE("entropy regimes") {
  const auto flat = build_lm(1000, 0, 1e6, 3);
  CHECK(entropy_nats(flat.table[0]) > std::log(1000.0) - 1e-3);

  // Symmetric Dirichlet rows: E[H] = digamma(n alpha + 1) - digamma(alpha + 1).
  const auto sparse = build_lm(1000, 1, 0.01, 3);
  double h = 0.0, h2 = 0.0;
  for (const auto& row : sparse.table) {
    const double e = entropy_nats(row);
    h += e;
    h2 += e * e;
  }
  const double n = double(sparse.table.size());
  const double mean_h = h / n;
  const double se = std::sqrt((h2 / n - mean_h * mean_h) / n);
  const double expected = oracle::digamma(1000 * 0.01 + 1) - oracle::digamma(0.01 + 1);
  CHECK(std::abs(mean_h - expected) < 4.0 * se);
  CHECK(mean_h < 0.5 * std::log(1000.0));
}

TEST_CASE("Dirichlet sample moments") {
  // E[x_i] = 1/n, Var[x_i] = (n-1) / (n^2 (n alpha + 1)).
  SplitMix64 rng(8);
  constexpr std::size_t n = 5;
  constexpr double alpha = 0.7;
  constexpr int draws = 40000;
  double m = 0.0, m2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double x = sample_dirichlet(n, alpha, rng)[2];
    m += x;
    m2 += x * x;
  }
  m /= draws;
  const double var = m2 / draws - m * m;
  CHECK(std::abs(m - 0.2) < 0.005);
  CHECK(std::abs(var - (n - 1.0) / (n * n * (n * alpha + 1.0))) < 0.003);
}

TEST_CASE("sampler transform") {
  SplitMix64 rng(4);
  const auto d = oracle::random_distribution(30, rng);
  CHECK(transform(d, {1.0, 1.0}).probs == d.probs);

  const auto cold = transform(d, {1e-6, 1.0});
  const auto argmax = std::max_element(d.probs.begin(), d.probs.end()) - d.probs.begin();
  CHECK(cold[static_cast<std::size_t>(argmax)] == doctest::Approx(1.0));

  const auto nucleus = transform(TokenDistribution::uniform(4), {1.0, 0.5});
  CHECK(nucleus.probs == std::vector<double>{0.5, 0.5, 0.0, 0.0});

  const auto hot = transform({{0.5, 0.25, 0.25}}, {2.0, 1.0});
  CHECK(hot[0] == doctest::Approx(std::sqrt(0.5) / (std::sqrt(0.5) + 2 * 0.5)));

  CHECK_THROWS_AS(transform(d, {0.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(transform(d, {1.0, 0.0}), ParameterError);
}

TEST_CASE("sample_token follows the distribution and skips zeros") {
  SplitMix64 rng(6);
  const TokenDistribution d{{0.0, 0.2, 0.0, 0.8}};
  int ones = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto t = sample_token(d, rng);
    CHECK((t == 1 || t == 3));
    ones += t == 1;
  }
  CHECK(std::abs(ones / 20000.0 - 0.2) < 0.01);
}

TEST_CASE("generation is deterministic and its trace is reproducible offline") {
  const auto lm = build_lm(200, 1, 1.0, 77);
  const std::vector<TokenId> prompt{3, 14, 15};
  const WatermarkKey key{0xFEED};
  const SamplerConfig cfg{0.9, 0.95};
  const auto policy = StrengthPolicy::exp();
  const auto a = generate(lm, prompt, 150, key, 0.5, policy, cfg, 4);
  const auto b = generate(lm, prompt, 150, key, 0.5, policy, cfg, 4);
  CHECK(a.tokens == b.tokens);
  REQUIRE(a.tokens.size() == 150);
  REQUIRE(a.pg_per_step.size() == 150);
  REQUIRE(a.r_per_step.size() == 150);

  TokenId prev = prompt.back();
  for (std::size_t i = 0; i < a.tokens.size(); ++i) {
    const auto part = partition_for(key, prev, lm.vocab_size, 0.5);
    const double pg = green_mass(transform(lm.next(prev), cfg), part);
    CHECK(pg == a.pg_per_step[i]);
    CHECK(strength(policy, pg) == a.r_per_step[i]);
    prev = a.tokens[i];
  }

  // Detector colors every position >= 1 exactly as the generator keyed it.
  const auto rep = score_sequence(a.tokens, key, 0.5, lm.vocab_size);
  for (std::size_t i = 1; i < a.tokens.size(); ++i)
    CHECK(rep.per_position_colors[i - 1] ==
          partition_for(key, a.tokens[i - 1], lm.vocab_size, 0.5).is_green(a.tokens[i]));

  CHECK_THROWS_AS(generate(lm, std::vector<TokenId>{}, 10, key, 0.5, policy, cfg, 1), InputError);
  CHECK_THROWS_AS(generate(lm, prompt, 0, key, 0.5, policy, cfg, 1), InputError);
}

TEST_CASE("near-zero strength leaves the green rate at gamma") {
  const auto lm = build_lm(500, 1, 1.0, 5);
  GenerationSpec gen;
  gen.num_sequences = 200;
  gen.length = 100;
  WatermarkSpec wm;
  wm.policy = StrengthPolicy::fixed(1e-10);
  const auto traces = generate_corpus(lm, wm, {}, gen, 99);
  double greens = 0, total = 0;
  for (const auto& t : traces) {
    const auto rep = score_sequence(t.tokens, wm.key, 0.5, lm.vocab_size);
    greens += rep.green_count;
    total += rep.total_scored;
  }
  const auto ci = oracle::wilson(greens, total, 3.0);
  CHECK(ci.lo < 0.5);
  CHECK(ci.hi > 0.5);
}

TEST_CASE("high-entropy LM with default exp policy is strongly detectable") {
  const auto lm = build_lm(1000, 1, 1.0, 0x5EED0001);
  GenerationSpec gen;
  gen.num_sequences = 200;
  gen.length = 200;
  WatermarkSpec wm;
  const auto traces = generate_corpus(lm, wm, {}, gen, 1234);
  double zsum = 0.0;
  for (const auto& t : traces) zsum += score_sequence(t.tokens, wm.key, 0.5, 1000).z;
  CHECK(zsum / 200.0 >= 4.0);
}

TEST_CASE("deterministic chain: P_G is 0 or 1 and policy has no effect") {
  const auto lm = build_chain_lm(300, 12);
  const std::vector<TokenId> prompt{7};
  WatermarkSpec none;
  none.method = WatermarkMethod::kNone;
  const auto base = generate(lm, prompt, 120, none, {}, 1);
  for (const auto& policy : {StrengthPolicy::exp(), StrengthPolicy::linear(3.0),
                             StrengthPolicy::fixed(0.9)}) {
    WatermarkSpec wm;
    wm.policy = policy;
    const auto t = generate(lm, prompt, 120, wm, {}, 2);
    CHECK(t.tokens == base.tokens);
    for (double pg : t.pg_per_step) CHECK((pg == 0.0 || pg == 1.0));
  }
  WatermarkSpec kgw;
  kgw.method = WatermarkMethod::kKgw;
  CHECK(generate(lm, prompt, 120, kgw, {}, 3).tokens == base.tokens);
}

TEST_CASE("P_G histograms") {
  GenerationSpec gen;
  gen.num_sequences = 40;
  gen.length = 100;
  WatermarkSpec none;
  none.method = WatermarkMethod::kNone;

  const auto flat = generate_corpus(build_lm(1000, 1, 1e6, 1), none, {}, gen, 1);
  const auto hf = pg_histogram(flat, 10);
  CHECK(hf[4] + hf[5] > 0.99);

  const auto chain = generate_corpus(build_chain_lm(1000, 1), none, {}, gen, 1);
  const auto hc = pg_histogram(chain, 10);
  CHECK(hc[0] + hc[9] == doctest::Approx(1.0));

  // Small vocabulary so the green mass of a Dirichlet(1) row is Beta(8, 8).
  const auto broad = generate_corpus(build_lm(16, 1, 1.0, 1), none, {}, gen, 1);
  const auto hb = pg_histogram(broad, 10);
  double total = 0.0;
  for (double h : hb) {
    CHECK(h <= 0.5);
    total += h;
  }
  CHECK(total == doctest::Approx(1.0));
  CHECK_THROWS_AS(pg_histogram(broad, 0), InputError);
  CHECK_THROWS_AS(pg_histogram(std::span<const GenerationTrace>{}, 10), InputError);
}

TEST_CASE("mean KL distortion uses the closed form per step") {
  GenerationTrace t;
  t.pg_per_step = {0.5, 0.0, 0.3};
  t.r_per_step = {0.5, 0.5, 0.2};
  const double expected = (-quality_kl(0.5, 0.5) - quality_kl(0.3, 0.2)) / 3.0;
  CHECK(mean_kl_distortion(t) == doctest::Approx(expected));
  t.r_per_step.clear();
  CHECK(mean_kl_distortion(t) == 0.0);
}
