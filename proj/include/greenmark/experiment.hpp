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
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "greenmark/config.hpp"
#include "greenmark/tradeoff.hpp"

namespace greenmark {

// One line of a trace file.
struct TraceRecord {
  std::size_t id = 0;
  std::string condition;
  GenerationTrace trace;
  std::optional<double> z;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

SyntheticLM make_lm(const LmSpec& spec);

// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

// Trial i draws its prompt and samples from SplitMix64(splitmix64(rng_seed + i)).
std::vector<GenerationTrace> generate_corpus(const SyntheticLM& lm, const WatermarkSpec& wm,
                                             const SamplerConfig& sampler,
                                             const GenerationSpec& gen,
                                             std::uint64_t rng_seed);

// Traces with z filled in (scored under the generating key).
std::vector<TraceRecord> run_generate(const ExperimentConfig& cfg);

void write_traces(std::ostream& out, std::span<const TraceRecord> records);
// Throws ParseError naming the 1-based line on malformed input.
std::vector<TraceRecord> read_traces(std::istream& in);

struct DetectionRow {
  std::size_t id = 0;
  std::string condition;
  DetectionReport report;
};

std::vector<DetectionRow> run_detect(std::span<const TraceRecord> records, WatermarkKey key,
                                     double gamma, std::size_t vocab_size,
                                     double z_threshold = kDefaultZThreshold);
// Header: id,condition,green_count,scored,z,decision
void write_detect_csv(std::ostream& out, std::span<const DetectionRow> rows);

// Attacked copies: tokens replaced, P_G/r/z dropped, condition suffixed with
// "+<attack label>".
std::vector<TraceRecord> run_attack(std::span<const TraceRecord> records,
                                    const AttackSpec& spec, std::size_t vocab_size);

nlohmann::json to_json(const DetectionReport& report);
DetectionReport detection_report_from_json(const nlohmann::json& j);

// Cached clean negatives plus the machinery to score one watermark setting.
class Benchmark {
 public:
  explicit Benchmark(ExperimentConfig cfg);

  const ExperimentConfig& config() const noexcept { return cfg_; }
  const SyntheticLM& lm() const noexcept { return lm_; }
  const std::vector<double>& clean_z() const noexcept { return clean_z_; }

  struct Cell {
    std::string method;
    std::string attack;  // "none" or attack label
    RocMetrics roc;
    double mean_z = 0.0;
  };

  struct MethodResult {
    std::string method;
    double mean_kl_distortion = 0.0;
    std::vector<Cell> cells;  // unattacked first, then one per config attack
    std::vector<TraceRecord> traces;
    std::vector<TraceRecord> attacked;  // all attacks, concatenated
    double generation_seconds = 0.0;
    double detection_seconds = 0.0;
  };

  MethodResult evaluate(const WatermarkSpec& wm) const;
  MethodResult evaluate(const WatermarkSpec& wm, std::span<const AttackSpec> attacks) const;

 private:
  std::vector<double> score(std::span<const std::vector<TokenId>> seqs) const;

  ExperimentConfig cfg_;
  SyntheticLM lm_;
  std::vector<double> clean_z_;
  std::size_t clean_tokens_ = 0;
  double clean_detection_seconds_ = 0.0;
};

struct BenchmarkOutput {
  nlohmann::json metrics;  // deterministic
  nlohmann::json timing;   // machine-dependent
  std::vector<std::string> score_rows;  // "trial_id,condition,z"
};

// Scores cfg.watermark and every cfg.compare entry, clean and under each attack.
BenchmarkOutput run_benchmark(const ExperimentConfig& cfg);

void write_scores_csv(std::ostream& out, std::span<const std::string> rows);

struct AnalyzeOutput {
  std::string surface_csv;  // pg,omega,metric,r,t,w,f
  std::string optimum_csv;  // pg,omega,metric,r_star,t,w,f
};

// r_steps evenly spaced strengths (i / (r_steps + 1)) for the surface.
AnalyzeOutput run_analyze(std::span<const double> omegas, std::span<const double> pg_grid,
                          QualityMetric metric, std::size_t r_steps = 99);

struct GoldenCase {
  std::uint64_t key = 0;
  TokenId prev_token = 0;
  std::size_t vocab_size = 0;
  double gamma = 0.5;
};

// The fixed case list behind tests/data/partition_goldens.json.
std::vector<GoldenCase> default_golden_cases();

// [{key, prev_token, vocab_size, gamma, seed, green_indices_first_16}, ...]
nlohmann::json partition_goldens(std::span<const GoldenCase> cases);

}  // namespace greenmark
