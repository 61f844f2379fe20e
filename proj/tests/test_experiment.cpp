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
#include <cstdio>
#include <fstream>
#include <sstream>

#include "greenmark/error.hpp"
#include "greenmark/experiment.hpp"

using namespace greenmark;

namespace {

ExperimentConfig small_config(std::size_t n = 40) {
  ExperimentConfig c;
  c.generation.num_sequences = n;
  c.generation.length = 60;
  c.generation.prompt_length = 5;
  return c;
}

std::string traces_text(const std::vector<TraceRecord>& r) {
  std::ostringstream out;
  write_traces(out, r);
  return out.str();
}

}  // namespace

TEST_CASE("traces round-trip through JSON lines") {
  auto cfg = small_config(10);
  const auto recs = run_generate(cfg);
  REQUIRE(recs.size() == 10);
  std::istringstream in(traces_text(recs));
  const auto back = read_traces(in);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].id == recs[i].id);
    CHECK(back[i].condition == recs[i].condition);
    CHECK(back[i].trace.tokens == recs[i].trace.tokens);
    CHECK(back[i].trace.pg_per_step == recs[i].trace.pg_per_step);
    CHECK(back[i].trace.r_per_step == recs[i].trace.r_per_step);
    CHECK(back[i].z == recs[i].z);
  }
  CHECK(traces_text(back) == traces_text(recs));
}

TEST_CASE("generation is reproducible byte for byte") {
  const auto cfg = small_config(30);
  CHECK(traces_text(run_generate(cfg)) == traces_text(run_generate(cfg)));
  auto other = cfg;
  other.generation.rng_seed ^= 1;
  CHECK(traces_text(run_generate(other)) != traces_text(run_generate(cfg)));
}

TEST_CASE("empty corpus and unwatermarked traces") {
  auto cfg = small_config(0);
  CHECK(traces_text(run_generate(cfg)).empty());
  std::ostringstream csv;
  write_detect_csv(csv, run_detect({}, cfg.watermark.key, 0.5, 1000));
  CHECK(csv.str() == "id,condition,green_count,scored,z,decision\n");

  cfg = small_config(3);
  cfg.watermark.method = WatermarkMethod::kNone;
  const auto text = traces_text(run_generate(cfg));
  CHECK(text.find("\"r\"") == std::string::npos);
  CHECK(text.find("\"pg\"") != std::string::npos);
  CHECK(text.find("\"condition\":\"none\"") != std::string::npos);
}

TEST_CASE("malformed trace lines name the line") {
  std::istringstream in("{\"tokens\":[1,2,3]}\n\n{\"tokens\":[1,\"x\"]}\n");
  try {
    read_traces(in);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream arr("[1,2]\n");
  CHECK_THROWS_AS(read_traces(arr), ParseError);
  std::istringstream missing("{\"id\":0}\n");
  CHECK_THROWS_AS(read_traces(missing), ParseError);
  std::istringstream ok("{\"tokens\":[4,5]}\n");
  const auto r = read_traces(ok);
  CHECK(r.size() == 1);
  CHECK(!r[0].z.has_value());
}

TEST_CASE("detect CSV rows") {
  const auto cfg = small_config(5);
  const auto recs = run_generate(cfg);
  const auto rows = run_detect(recs, cfg.watermark.key, 0.5, 1000);
  std::ostringstream csv;
  write_detect_csv(csv, rows);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    CHECK(line.rfind(std::to_string(n) + ",morphmark_exp(k=1.3,p0=0.15),", 0) == 0);
    CHECK(rows[n].report.z == *recs[n].z);
    ++n;
  }
  CHECK(n == 5);
}

TEST_CASE("unwatermarked FPR at the default threshold is near one percent") {
  auto cfg = small_config(1000);
  cfg.generation.length = 200;
  cfg.watermark.method = WatermarkMethod::kNone;
  const auto rows = run_detect(run_generate(cfg), cfg.watermark.key, 0.5, 1000);
  std::size_t pos = 0;
  for (const auto& r : rows) pos += r.report.is_watermarked;
  const double fpr = double(pos) / double(rows.size());
  CHECK(fpr >= 0.003);
  CHECK(fpr <= 0.025);
}

TEST_CASE("wrong key gives a standard normal z") {
  auto cfg = small_config(500);
  cfg.generation.length = 200;
  const auto recs = run_generate(cfg);
  const auto rows = run_detect(recs, WatermarkKey{cfg.watermark.key.value ^ 0xABCDEFULL}, 0.5, 1000);
  double s = 0.0, ss = 0.0;
  for (const auto& r : rows) {
    s += r.report.z;
    ss += r.report.z * r.report.z;
  }
  const double n = double(rows.size());
  const double m = s / n;
  CHECK(std::abs(m) < 3.0 / std::sqrt(n));
  CHECK(ss / n - m * m == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("run_attack relabels and drops stale fields") {
  const auto cfg = small_config(4);
  const auto recs = run_generate(cfg);
  AttackSpec a;
  a.kind = AttackKind::kDelete;
  a.rate = 0.5;
  const auto out = run_attack(recs, a, 1000);
  REQUIRE(out.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(out[i].condition == recs[i].condition + "+delete0.5");
    CHECK(out[i].trace.tokens.size() == 30);
    CHECK(out[i].trace.pg_per_step.empty());
    CHECK(!out[i].z.has_value());
  }
}

TEST_CASE("detection report JSON round-trip") {
  const auto rep = detect(std::vector<TokenId>{1, 2, 3, 4, 5}, WatermarkKey{3}, 0.5, 10);
  CHECK(detection_report_from_json(to_json(rep)) == rep);
  auto j = to_json(rep);
  j["green_count"] = 99;
  CHECK_THROWS_AS(detection_report_from_json(j), InputError);
}

TEST_CASE("analyze output") {
  const double om[] = {0.2};
  const double one[] = {0.5};
  const auto single = run_analyze(om, one, QualityMetric::kBhattacharyya, 9);
  std::istringstream opt(single.optimum_csv);
  std::string line;
  std::size_t rows = 0;
  std::getline(opt, line);
  CHECK(line == "pg,omega,metric,r_star,t,w,f");
  while (std::getline(opt, line)) ++rows;
  CHECK(rows == 1);
  std::size_t surf = 0;
  for (char ch : single.surface_csv) surf += ch == '\n';
  CHECK(surf == 1 + 9);

  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
  const double omegas[] = {0.2, 0.4};
  for (auto metric : {QualityMetric::kBhattacharyya, QualityMetric::kNegKl}) {
    const auto a = run_analyze(omegas, grid, metric);
    std::istringstream in(a.optimum_csv);
    std::getline(in, line);
    double prev_r = -1.0, prev_omega = -1.0;
    while (std::getline(in, line)) {
      double pg, omega, r;
      char metric_name[8];
      REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%7[^,],%lf", &pg, &omega, metric_name, &r) == 4);
      if (omega != prev_omega) prev_r = -1.0;
      CHECK(r > prev_r);
      prev_r = r;
      prev_omega = omega;
    }
  }
  const double bad[] = {1.0};
  CHECK_THROWS_AS(run_analyze(om, bad, QualityMetric::kNegKl), InputError);
}

TEST_CASE("benchmark on separated scores") {
  auto cfg = small_config(60);
  cfg.generation.length = 200;
  cfg.watermark.policy = StrengthPolicy::fixed(0.9);
  const auto out = run_benchmark(cfg);
  const auto& cell = out.metrics.at("methods").at(0).at("cells").at(0);
  CHECK(cell.at("attack") == "none");
  CHECK(cell.at("tpr_at_fpr").at("0.01").get<double>() == 1.0);
  CHECK(cell.at("auroc").get<double>() == 1.0);
  CHECK(cell.at("best_f1").get<double>() == 1.0);
  CHECK(out.score_rows.size() == 120);
  CHECK(run_benchmark(cfg).metrics.dump() == out.metrics.dump());
}

TEST_CASE("benchmark rejects methods with a different key") {
  const Benchmark bench(small_config(5));
  WatermarkSpec wm;
  wm.key = WatermarkKey{1};
  CHECK_THROWS_AS(bench.evaluate(wm), InputError);
}

TEST_CASE("exp strength sweep") {
  auto cfg = small_config(200);
  cfg.generation.length = 200;
  AttackSpec sub;
  const AttackSpec attacks[] = {sub};
  const Benchmark bench(cfg);
  double prev_tpr = -1.0, prev_kl = -1.0;
  for (double k : {0.05, 0.1, 0.2, 0.4}) {
    WatermarkSpec wm = cfg.watermark;
    wm.policy = StrengthPolicy::exp(k);
    const auto res = bench.evaluate(wm, attacks);
    const double tpr = res.cells.at(1).roc.tpr_at_fpr.at(0.01);
    CHECK(tpr >= prev_tpr);
    CHECK(res.mean_kl_distortion > prev_kl);
    prev_tpr = tpr;
    prev_kl = res.mean_kl_distortion;
  }
}

TEST_CASE("partition goldens match the checked-in file") {
  std::ifstream f(std::string(GREENMARK_TEST_DATA) + "/partition_goldens.json");
  REQUIRE(f);
  const auto expected = nlohmann::json::parse(f);
  const auto cases = default_golden_cases();
  CHECK(partition_goldens(cases) == expected);
}
