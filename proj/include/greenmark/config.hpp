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
#include <string>
#include <vector>

#include <json.hpp>

#include "greenmark/attack.hpp"
#include "greenmark/detect.hpp"
#include "greenmark/textgen.hpp"

namespace greenmark {

inline constexpr int kConfigSchemaVersion = 1;

struct LmSpec {
  LmKind kind = LmKind::kDirichlet;
  std::size_t vocab_size = 1000;
  int order = 1;
  double entropy_param = 1.0;
  std::uint64_t seed = 0x5EED0001ULL;

  friend bool operator==(const LmSpec&, const LmSpec&) = default;
};

struct GenerationSpec {
  std::size_t num_sequences = 400;
  std::size_t length = 200;
  std::size_t prompt_length = 30;
  std::uint64_t rng_seed = 0x5EED0002ULL;
  // Seed of the unwatermarked reference corpus used as benchmark negatives.
  std::uint64_t clean_rng_seed = 0x5EED0002ULL ^ 0xC1EA0C0A95E5EED5ULL;

  friend bool operator==(const GenerationSpec&, const GenerationSpec&) = default;
};

struct MetricsSpec {
  std::vector<double> fpr_levels{0.01};
  double z_threshold = kDefaultZThreshold;

  friend bool operator==(const MetricsSpec&, const MetricsSpec&) = default;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  LmSpec lm;
  SamplerConfig sampler;
  WatermarkSpec watermark;
  GenerationSpec generation;
  std::vector<AttackSpec> attacks;
  MetricsSpec metrics;
  // Extra methods the benchmark scores next to `watermark`.
  std::vector<WatermarkSpec> compare;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

std::string to_string(WatermarkMethod m);
WatermarkMethod parse_watermark_method(const std::string& name);

// Condition label, e.g. "morphmark_exp(k=1.3,p0=0.15)", "kgw(delta=1.25)",
// "none".
std::string method_label(const WatermarkSpec& wm);

std::string format_key(std::uint64_t key);  // "0x%016x"
// Accepts "0x..." hex, decimal strings, or non-negative JSON integers.
std::uint64_t parse_u64(const nlohmann::json& j, const std::string& path);

nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const WatermarkSpec& wm);
nlohmann::json to_json(const AttackSpec& spec);

// Missing fields take their defaults; unknown fields and wrong types raise
// ConfigError with the JSON path of the field.
ExperimentConfig config_from_json(const nlohmann::json& j);
WatermarkSpec watermark_from_json(const nlohmann::json& j, const std::string& path);
AttackSpec attack_from_json(const nlohmann::json& j, const std::string& path);

// Throws IoError if the file cannot be read, ConfigError if it is not JSON.
ExperimentConfig load_config(const std::string& path);

}  // namespace greenmark
