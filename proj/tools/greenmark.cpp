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

// greenmark: command-line driver for watermark generation, detection,
// attacks, benchmarks and trade-off analysis.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "greenmark/config.hpp"
#include "greenmark/error.hpp"
#include "greenmark/experiment.hpp"

namespace fs = std::filesystem;
using namespace greenmark;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigFailure = 2, kIoFailure = 3, kAttackFailure = 4 };

struct Overrides {
  std::string config_path;
  std::optional<std::string> seed;
  std::optional<std::string> key;
  std::optional<std::string> method;
  std::optional<std::string> policy;
  std::optional<double> k;
  std::optional<double> p0;
  std::optional<double> gamma;
  std::optional<double> delta;
  std::vector<double> fpr;
  std::optional<std::size_t> num_sequences;
  std::optional<std::size_t> length;
};

std::uint64_t parse_flag_u64(const std::string& text, const std::string& flag) {
  return parse_u64(nlohmann::json(text), flag);
}

ExperimentConfig resolve_config(const Overrides& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  auto& wm = cfg.watermark;
  try {
    if (o.seed) cfg.generation.rng_seed = parse_flag_u64(*o.seed, "--seed");
    if (o.key) wm.key = WatermarkKey{parse_flag_u64(*o.key, "--key")};
    if (o.method) wm.method = parse_watermark_method(*o.method);
    if (o.policy) {
      const StrengthKind kind = parse_strength_kind(*o.policy);
      if (kind != wm.policy.kind) {
        const double p0 = wm.policy.p0;
        switch (kind) {
          case StrengthKind::kLinear: wm.policy = StrengthPolicy::linear(kDefaultKLinear, p0); break;
          case StrengthKind::kExp: wm.policy = StrengthPolicy::exp(kDefaultKExp, p0); break;
          case StrengthKind::kLog: wm.policy = StrengthPolicy::log(kDefaultKLog, p0); break;
          case StrengthKind::kFixed: wm.policy = StrengthPolicy::fixed(wm.policy.fixed_r, 0.0); break;
        }
      }
    }
  } catch (const ParameterError& e) {
    throw ConfigError("flags", e.what());
  }
  if (o.k) {
    if (wm.policy.kind == StrengthKind::kFixed)
      wm.policy.fixed_r = *o.k;
    else
      wm.policy.k = *o.k;
  }
  if (o.p0) wm.policy.p0 = *o.p0;
  if (o.gamma) wm.gamma = *o.gamma;
  if (o.delta) wm.kgw.delta = *o.delta;
  if (!o.fpr.empty()) cfg.metrics.fpr_levels = o.fpr;
  if (o.num_sequences) cfg.generation.num_sequences = *o.num_sequences;
  if (o.length) cfg.generation.length = *o.length;
  for (auto& c : cfg.compare) {
    c.key = wm.key;
    c.gamma = wm.gamma;
  }
  cfg.validate();
  return cfg;
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << content;
  f.close();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<TraceRecord> read_trace_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open trace file '" + path + "'");
  return read_traces(f);
}

std::string traces_to_string(std::span<const TraceRecord> recs) {
  std::ostringstream s;
  write_traces(s, recs);
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"greenmark: green/red-list watermarking toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  std::string out_dir = "out";
  app.add_option("--config", o.config_path, "Experiment config (JSON)");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", o.seed, "Generation RNG seed (decimal or 0x hex)");
  app.add_option("--key", o.key, "Watermark key (decimal or 0x hex)");
  app.add_option("--method", o.method, "morphmark | kgw | none");
  app.add_option("--policy", o.policy, "Strength policy: linear | exp | log | fixed");
  app.add_option("--k", o.k, "Policy coefficient (strength r for the fixed policy)");
  app.add_option("--p0", o.p0, "Watermarking threshold on P_G");
  app.add_option("--gamma", o.gamma, "Green-list fraction");
  app.add_option("--delta", o.delta, "KGW logit bias");
  app.add_option("--fpr", o.fpr, "FPR levels for TPR reporting")->delimiter(',');
  app.add_option("--num-sequences", o.num_sequences, "Number of sequences");
  app.add_option("--length", o.length, "Generated tokens per sequence");

  auto* gen = app.add_subcommand("generate", "Generate watermarked traces (traces.jsonl)");

  auto* det = app.add_subcommand("detect", "Score traces (detect.csv)");
  std::string det_in;
  std::optional<double> threshold;
  det->add_option("--in", det_in, "Trace file (default <out>/traces.jsonl)");
  det->add_option("--threshold", threshold, "z threshold");

  auto* att = app.add_subcommand("attack", "Attack traces (attacked.jsonl)");
  std::string att_in, att_kind = "substitute", endpoint;
  double rate = 0.3;
  std::optional<std::string> att_seed;
  att->add_option("--in", att_in, "Trace file (default <out>/traces.jsonl)");
  att->add_option("--attack", att_kind, "substitute | delete | paraphrase")->capture_default_str();
  att->add_option("--rate", rate, "Attack rate")->capture_default_str();
  att->add_option("--attack-seed", att_seed, "Attack RNG seed");
  att->add_option("--endpoint", endpoint, "Paraphrase endpoint, http://host:port/path");

  auto* bench = app.add_subcommand("benchmark", "Benchmark methods (metrics.json, scores.csv)");

  auto* ana = app.add_subcommand("analyze", "Trade-off surface (surface.csv, optimum.csv)");
  std::vector<double> omegas{0.2, 0.4};
  std::vector<double> pg_grid;
  std::string metric_name = "bc";
  std::size_t r_steps = 99;
  ana->add_option("--omega", omegas, "Trade-off weights")->delimiter(',');
  ana->add_option("--pg-grid", pg_grid, "P_G grid (default 0.05..0.95)")->delimiter(',');
  ana->add_option("--metric", metric_name, "bc | kl")->capture_default_str();
  ana->add_option("--r-steps", r_steps, "Strength grid size for the surface")->capture_default_str();

  auto* gold = app.add_subcommand("goldens", "Emit partition golden vectors (goldens.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  try {
    const fs::path out = prepare_out(out_dir);
    if (*gold) {
      write_file(out / "goldens.json", partition_goldens(default_golden_cases()).dump(2) + "\n");
      return kOk;
    }
    if (*ana) {
      QualityMetric metric;
      try {
        metric = parse_quality_metric(metric_name);
      } catch (const ParameterError& e) {
        throw ConfigError("--metric", e.what());
      }
      if (pg_grid.empty())
        for (int i = 1; i <= 19; ++i) pg_grid.push_back(0.05 * i);
      AnalyzeOutput res;
      try {
        res = run_analyze(omegas, pg_grid, metric, r_steps);
      } catch (const InputError& e) {
        throw ConfigError("--omega/--pg-grid", e.what());
      }
      write_file(out / "surface.csv", res.surface_csv);
      write_file(out / "optimum.csv", res.optimum_csv);
      return kOk;
    }

    const ExperimentConfig cfg = resolve_config(o);
    if (*gen) {
      write_file(out / "traces.jsonl", traces_to_string(run_generate(cfg)));
    } else if (*det) {
      const auto recs = read_trace_file(det_in.empty() ? (out / "traces.jsonl").string() : det_in);
      const auto rows = run_detect(recs, cfg.watermark.key, cfg.watermark.gamma,
                                   cfg.lm.vocab_size, threshold.value_or(cfg.metrics.z_threshold));
      std::ostringstream csv;
      write_detect_csv(csv, rows);
      write_file(out / "detect.csv", csv.str());
    } else if (*att) {
      AttackSpec spec;
      try {
        spec.kind = parse_attack_kind(att_kind);
        if (att_seed) spec.rng_seed = parse_flag_u64(*att_seed, "--attack-seed");
      } catch (const ParameterError& e) {
        throw ConfigError("--attack", e.what());
      }
      spec.rate = rate;
      spec.endpoint = endpoint;
      if (!(rate >= 0.0 && rate <= 1.0) || (spec.kind == AttackKind::kDelete && rate >= 1.0))
        throw ConfigError("--rate", "out of range");
      const auto recs = read_trace_file(att_in.empty() ? (out / "traces.jsonl").string() : att_in);
      write_file(out / "attacked.jsonl",
                 traces_to_string(run_attack(recs, spec, cfg.lm.vocab_size)));
    } else if (*bench) {
      const auto res = run_benchmark(cfg);
      write_file(out / "metrics.json", res.metrics.dump(2) + "\n");
      std::ostringstream csv;
      write_scores_csv(csv, res.score_rows);
      write_file(out / "scores.csv", csv.str());
      write_file(out / "timing.json", res.timing.dump(2) + "\n");
    }
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const AttackUnavailable& e) {
    std::cerr << "attack unavailable: " << e.what() << '\n';
    return kAttackFailure;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const ParseError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
