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

#include "greenmark/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "greenmark/error.hpp"

namespace greenmark {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

SyntheticLM make_lm(const LmSpec& spec) {
  if (spec.kind == LmKind::kChain) return build_chain_lm(spec.vocab_size, spec.seed);
  return build_lm(spec.vocab_size, spec.order, spec.entropy_param, spec.seed);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<GenerationTrace> generate_corpus(const SyntheticLM& lm, const WatermarkSpec& wm,
                                             const SamplerConfig& sampler,
                                             const GenerationSpec& gen,
                                             std::uint64_t rng_seed) {
  std::vector<GenerationTrace> out(gen.num_sequences);
  parallel_for(gen.num_sequences, [&](std::size_t i) {
    const std::uint64_t trial_seed = splitmix64(rng_seed + i);
    SplitMix64 prompt_rng(trial_seed);
    const auto prompt = sample_prompt(lm, gen.prompt_length, prompt_rng);
    out[i] = generate(lm, prompt, gen.length, wm, sampler, splitmix64(trial_seed));
  });
  return out;
}

std::vector<TraceRecord> run_generate(const ExperimentConfig& cfg) {
  cfg.validate();
  const SyntheticLM lm = make_lm(cfg.lm);
  auto traces = generate_corpus(lm, cfg.watermark, cfg.sampler, cfg.generation,
                                cfg.generation.rng_seed);
  const std::string cond = method_label(cfg.watermark);
  std::vector<TraceRecord> out(traces.size());
  parallel_for(traces.size(), [&](std::size_t i) {
    out[i].id = i;
    out[i].condition = cond;
    if (traces[i].tokens.size() >= 2)
      out[i].z = score_sequence(traces[i].tokens, cfg.watermark.key, cfg.watermark.gamma,
                                cfg.lm.vocab_size)
                     .z;
    out[i].trace = std::move(traces[i]);
  });
  return out;
}

void write_traces(std::ostream& out, std::span<const TraceRecord> records) {
  for (const auto& r : records) {
    ordered_json j;
    j["id"] = r.id;
    j["condition"] = r.condition;
    j["tokens"] = r.trace.tokens;
    if (!r.trace.pg_per_step.empty()) j["pg"] = r.trace.pg_per_step;
    if (!r.trace.r_per_step.empty()) j["r"] = r.trace.r_per_step;
    if (r.z) j["z"] = *r.z;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing trace stream");
}

std::vector<TraceRecord> read_traces(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw ParseError(lineno, "expected a JSON object");
      TraceRecord r;
      r.id = j.contains("id") ? j.at("id").get<std::size_t>() : out.size();
      r.condition = j.value("condition", std::string("unknown"));
      r.trace.tokens = j.at("tokens").get<std::vector<TokenId>>();
      if (j.contains("pg")) r.trace.pg_per_step = j.at("pg").get<std::vector<double>>();
      if (j.contains("r")) r.trace.r_per_step = j.at("r").get<std::vector<double>>();
      if (j.contains("z") && !j.at("z").is_null()) r.z = j.at("z").get<double>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(lineno, std::string("malformed trace: ") + e.what());
    }
  }
  return out;
}

std::vector<DetectionRow> run_detect(std::span<const TraceRecord> records, WatermarkKey key,
                                     double gamma, std::size_t vocab_size,
                                     double z_threshold) {
  std::vector<DetectionRow> rows(records.size());
  parallel_for(records.size(), [&](std::size_t i) {
    rows[i].id = records[i].id;
    rows[i].condition = records[i].condition;
    rows[i].report = detect(records[i].trace.tokens, key, gamma, vocab_size, z_threshold);
  });
  return rows;
}

void write_detect_csv(std::ostream& out, std::span<const DetectionRow> rows) {
  out << "id,condition,green_count,scored,z,decision\n";
  for (const auto& r : rows)
    out << r.id << ',' << r.condition << ',' << r.report.green_count << ','
        << r.report.total_scored << ',' << fmt(r.report.z) << ','
        << (r.report.is_watermarked ? 1 : 0) << '\n';
  if (!out) throw IoError("failed writing detection CSV");
}

std::vector<TraceRecord> run_attack(std::span<const TraceRecord> records,
                                    const AttackSpec& spec, std::size_t vocab_size) {
  std::vector<TraceRecord> out(records.size());
  const std::string suffix = "+" + spec.label();
  parallel_for(records.size(), [&](std::size_t i) {
    out[i].id = records[i].id;
    out[i].condition = records[i].condition + suffix;
    out[i].trace.tokens =
        apply_attack(records[i].trace.tokens, spec, vocab_size, records[i].id);
  });
  return out;
}

json to_json(const DetectionReport& r) {
  return json{{"total_scored", r.total_scored},
              {"green_count", r.green_count},
              {"z", r.z},
              {"threshold", r.threshold},
              {"is_watermarked", r.is_watermarked},
              {"per_position_colors", r.per_position_colors}};
}

DetectionReport detection_report_from_json(const json& j) {
  DetectionReport r;
  r.total_scored = j.at("total_scored").get<std::size_t>();
  r.green_count = j.at("green_count").get<std::size_t>();
  r.z = j.at("z").get<double>();
  r.threshold = j.at("threshold").get<double>();
  r.is_watermarked = j.at("is_watermarked").get<bool>();
  r.per_position_colors = j.at("per_position_colors").get<std::vector<bool>>();
  if (r.green_count > r.total_scored)
    throw InputError("green_count exceeds total_scored");
  return r;
}

Benchmark::Benchmark(ExperimentConfig cfg) : cfg_(std::move(cfg)), lm_(make_lm(cfg_.lm)) {
  cfg_.validate();
  WatermarkSpec none = cfg_.watermark;
  none.method = WatermarkMethod::kNone;
  const auto clean = generate_corpus(lm_, none, cfg_.sampler, cfg_.generation,
                                     cfg_.generation.clean_rng_seed);
  std::vector<std::vector<TokenId>> seqs;
  seqs.reserve(clean.size());
  for (const auto& t : clean) {
    clean_tokens_ += t.tokens.size();
    seqs.push_back(t.tokens);
  }
  const auto start = Clock::now();
  clean_z_ = score(seqs);
  clean_detection_seconds_ = seconds_since(start);
}

std::vector<double> Benchmark::score(std::span<const std::vector<TokenId>> seqs) const {
  std::vector<double> z(seqs.size());
  parallel_for(seqs.size(), [&](std::size_t i) {
    z[i] = score_sequence(seqs[i], cfg_.watermark.key, cfg_.watermark.gamma, lm_.vocab_size).z;
  });
  return z;
}

Benchmark::MethodResult Benchmark::evaluate(const WatermarkSpec& wm) const {
  return evaluate(wm, cfg_.attacks);
}

Benchmark::MethodResult Benchmark::evaluate(const WatermarkSpec& wm,
                                            std::span<const AttackSpec> attacks) const {
  if (wm.key != cfg_.watermark.key || wm.gamma != cfg_.watermark.gamma)
    throw InputError("benchmark methods must share the detection key and gamma");
  MethodResult res;
  res.method = method_label(wm);

  auto start = Clock::now();
  auto traces = generate_corpus(lm_, wm, cfg_.sampler, cfg_.generation, cfg_.generation.rng_seed);
  res.generation_seconds = seconds_since(start);

  std::vector<std::vector<TokenId>> seqs;
  seqs.reserve(traces.size());
  double kl_sum = 0.0;
  for (const auto& t : traces) {
    seqs.push_back(t.tokens);
    kl_sum += mean_kl_distortion(t);
  }
  res.mean_kl_distortion = traces.empty() ? 0.0 : kl_sum / static_cast<double>(traces.size());

  start = Clock::now();
  const auto wm_z = score(seqs);
  res.detection_seconds = seconds_since(start);

  res.traces.resize(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    res.traces[i].id = i;
    res.traces[i].condition = res.method;
    res.traces[i].z = wm_z[i];
    res.traces[i].trace = std::move(traces[i]);
  }

  res.cells.push_back({res.method, "none",
                       roc_metrics(wm_z, clean_z_, cfg_.metrics.fpr_levels), mean(wm_z)});
  for (const auto& spec : attacks) {
    auto attacked = run_attack(res.traces, spec, lm_.vocab_size);
    std::vector<std::vector<TokenId>> aseqs;
    aseqs.reserve(attacked.size());
    for (const auto& r : attacked) aseqs.push_back(r.trace.tokens);
    const auto az = score(aseqs);
    for (std::size_t i = 0; i < attacked.size(); ++i) attacked[i].z = az[i];
    res.cells.push_back({res.method, spec.label(),
                         roc_metrics(az, clean_z_, cfg_.metrics.fpr_levels), mean(az)});
    std::move(attacked.begin(), attacked.end(), std::back_inserter(res.attacked));
  }
  return res;
}

BenchmarkOutput run_benchmark(const ExperimentConfig& cfg) {
  const Benchmark bench(cfg);
  std::vector<WatermarkSpec> methods{cfg.watermark};
  methods.insert(methods.end(), cfg.compare.begin(), cfg.compare.end());

  BenchmarkOutput out;
  ordered_json metrics;
  metrics["schema_version"] = kConfigSchemaVersion;
  metrics["clean"] = {{"num_sequences", bench.clean_z().size()},
                      {"mean_z", mean(bench.clean_z())}};
  ordered_json method_list = ordered_json::array();
  ordered_json timing_list = ordered_json::array();

  for (std::size_t i = 0; i < bench.clean_z().size(); ++i)
    out.score_rows.push_back(std::to_string(i) + ",clean," + fmt(bench.clean_z()[i]));

  const double tokens_per_corpus =
      static_cast<double>(cfg.generation.num_sequences * cfg.generation.length);
  for (const auto& wm : methods) {
    const auto res = bench.evaluate(wm);
    ordered_json cells = ordered_json::array();
    for (const auto& c : res.cells) {
      ordered_json tpr;
      for (const auto& [fpr, v] : c.roc.tpr_at_fpr) tpr[fmt(fpr)] = v;
      cells.push_back({{"attack", c.attack},
                       {"tpr_at_fpr", tpr},
                       {"best_f1", c.roc.best_f1},
                       {"auroc", c.roc.auroc},
                       {"mean_z", c.mean_z}});
    }
    method_list.push_back({{"method", res.method},
                           {"mean_kl_distortion", res.mean_kl_distortion},
                           {"cells", cells}});
    const double per800 = tokens_per_corpus > 0 ? 800.0 / tokens_per_corpus : 0.0;
    timing_list.push_back({{"method", res.method},
                           {"generation_seconds_per_800_tokens", res.generation_seconds * per800},
                           {"detection_ms_per_800_tokens", 1e3 * res.detection_seconds * per800}});
    for (const auto& r : res.traces)
      out.score_rows.push_back(std::to_string(r.id) + "," + r.condition + "," + fmt(*r.z));
    for (const auto& r : res.attacked)
      out.score_rows.push_back(std::to_string(r.id) + "," + r.condition + "," + fmt(*r.z));
  }
  metrics["methods"] = method_list;
  out.metrics = json::parse(metrics.dump());
  out.timing = json{{"note", "wall-clock, machine dependent"},
                    {"methods", json::parse(timing_list.dump())}};
  return out;
}

void write_scores_csv(std::ostream& out, std::span<const std::string> rows) {
  out << "trial_id,condition,z\n";
  for (const auto& r : rows) out << r << '\n';
  if (!out) throw IoError("failed writing score CSV");
}

AnalyzeOutput run_analyze(std::span<const double> omegas, std::span<const double> pg_grid,
                          QualityMetric metric, std::size_t r_steps) {
  for (double w : omegas)
    if (!(w > 0.0)) throw InputError("omega values must be positive");
  for (double pg : pg_grid)
    if (!(pg > 0.0 && pg < 1.0)) throw InputError("P_G grid must be interior");

  std::ostringstream surface, optimum;
  surface << "pg,omega,metric,r,t,w,f\n";
  optimum << "pg,omega,metric,r_star,t,w,f\n";
  const std::string m(to_string(metric));
  for (double omega : omegas)
    for (double pg : pg_grid) {
      for (std::size_t i = 1; i <= r_steps; ++i) {
        const double r = static_cast<double>(i) / static_cast<double>(r_steps + 1);
        const auto p = objective({pg, r, omega, metric});
        surface << fmt(pg) << ',' << fmt(omega) << ',' << m << ',' << fmt(r) << ','
                << fmt(p.t_value) << ',' << fmt(p.w_value) << ',' << fmt(p.f_value) << '\n';
      }
      const double r_star = optimal_r(pg, omega, metric);
      const auto p = objective({pg, r_star, omega, metric});
      optimum << fmt(pg) << ',' << fmt(omega) << ',' << m << ',' << fmt(r_star) << ','
              << fmt(p.t_value) << ',' << fmt(p.w_value) << ',' << fmt(p.f_value) << '\n';
    }
  return {surface.str(), optimum.str()};
}

std::vector<GoldenCase> default_golden_cases() {
  return {
      {0x9E3779B97F4A7C15ULL, 0, 4, 0.5},
      {0x9E3779B97F4A7C15ULL, 0, 1000, 0.5},
      {0x9E3779B97F4A7C15ULL, 17, 1000, 0.5},
      {0x0ULL, 0, 64, 0.5},
      {0x1ULL, 1, 64, 0.25},
      {0xDEADBEEFCAFEF00DULL, 999, 1000, 0.5},
      {0xDEADBEEFCAFEF00DULL, 42, 50000, 0.5},
      {0x123456789ABCDEF0ULL, 7, 50257, 0.5},
      {0xFFFFFFFFFFFFFFFFULL, 3, 100, 0.29},
      {0x00000000000003E8ULL, 12, 32000, 0.1},
      {0x5EED5EED5EED5EEDULL, 255, 256, 0.75},
      {0x2545F4914F6CDD1DULL, 1, 17, 0.9},
  };
}

json partition_goldens(std::span<const GoldenCase> cases) {
  json out = json::array();
  for (const auto& c : cases) {
    const std::uint64_t seed = derive_seed(WatermarkKey{c.key}, c.prev_token);
    auto greens = partition(seed, c.vocab_size, c.gamma).green_indices();
    if (greens.size() > 16) greens.resize(16);
    out.push_back({{"key", format_key(c.key)},
                   {"prev_token", c.prev_token},
                   {"vocab_size", c.vocab_size},
                   {"gamma", c.gamma},
                   {"seed", format_key(seed)},
                   {"green_indices_first_16", greens}});
  }
  return out;
}

}  // namespace greenmark
