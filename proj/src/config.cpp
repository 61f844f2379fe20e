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

#include "greenmark/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "greenmark/error.hpp"

namespace greenmark {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void require_object(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.contains(k)) throw ConfigError(path + "." + k, "unknown field");
}

template <typename T>
void read_field(const json& j, const std::string& path, const char* name, T& out) {
  if (!j.contains(name)) return;
  const auto& v = j.at(name);
  const std::string p = path + "." + name;
  if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw ConfigError(p, "expected a number");
    out = v.get<double>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ConfigError(p, "expected a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_same_v<T, int>) {
    if (!v.is_number_integer()) throw ConfigError(p, "expected an integer");
    out = v.get<int>();
  } else {
    if (!v.is_number_unsigned()) throw ConfigError(p, "expected a non-negative integer");
    out = v.get<T>();
  }
}

void read_u64(const json& j, const std::string& path, const char* name,
              std::uint64_t& out) {
  if (j.contains(name)) out = parse_u64(j.at(name), path + "." + name);
}

template <typename Parse>
auto rethrow_as_config(const std::string& path, Parse&& parse) {
  try {
    return parse();
  } catch (const ParameterError& e) {
    throw ConfigError(path, e.what());
  }
}

json policy_to_json(const StrengthPolicy& p) {
  return json{{"kind", std::string(to_string(p.kind))},
              {"k", p.k},
              {"p0", p.p0},
              {"eps", p.eps},
              {"fixed_r", p.fixed_r}};
}

StrengthPolicy policy_from_json(const json& j, const std::string& path) {
  require_object(j, path, {"kind", "k", "p0", "eps", "fixed_r"});
  StrengthPolicy p;
  std::string kind(to_string(p.kind));
  read_field(j, path, "kind", kind);
  p.kind = rethrow_as_config(path + ".kind", [&] { return parse_strength_kind(kind); });
  // Kind-specific default slope unless one is given.
  switch (p.kind) {
    case StrengthKind::kLinear: p.k = kDefaultKLinear; break;
    case StrengthKind::kExp: p.k = kDefaultKExp; break;
    case StrengthKind::kLog: p.k = kDefaultKLog; break;
    case StrengthKind::kFixed: p.k = 1.0; p.p0 = 0.0; break;
  }
  read_field(j, path, "k", p.k);
  read_field(j, path, "p0", p.p0);
  read_field(j, path, "eps", p.eps);
  read_field(j, path, "fixed_r", p.fixed_r);
  return p;
}

std::string lm_kind_name(LmKind k) { return k == LmKind::kChain ? "chain" : "dirichlet"; }

}  // namespace

std::string to_string(WatermarkMethod m) {
  switch (m) {
    case WatermarkMethod::kNone: return "none";
    case WatermarkMethod::kMorphMark: return "morphmark";
    case WatermarkMethod::kKgw: return "kgw";
  }
  return "?";
}

WatermarkMethod parse_watermark_method(const std::string& name) {
  if (name == "none") return WatermarkMethod::kNone;
  if (name == "morphmark") return WatermarkMethod::kMorphMark;
  if (name == "kgw") return WatermarkMethod::kKgw;
  throw ParameterError("unknown watermark method '" + name + "'");
}

std::string method_label(const WatermarkSpec& wm) {
  switch (wm.method) {
    case WatermarkMethod::kNone: return "none";
    case WatermarkMethod::kKgw: return "kgw(delta=" + fmt_double(wm.kgw.delta) + ")";
    case WatermarkMethod::kMorphMark: {
      std::string s = "morphmark_" + std::string(to_string(wm.policy.kind)) + "(";
      if (wm.policy.kind == StrengthKind::kFixed)
        s += "r=" + fmt_double(wm.policy.fixed_r);
      else
        s += "k=" + fmt_double(wm.policy.k);
      return s + ",p0=" + fmt_double(wm.policy.p0) + ")";
    }
  }
  return "?";
}

std::string format_key(std::uint64_t key) {
  char buf[19] = "0x";
  const auto res = std::to_chars(buf + 2, buf + sizeof buf, key, 16);
  std::string digits(buf + 2, res.ptr);
  return "0x" + std::string(16 - digits.size(), '0') + digits;
}

std::uint64_t parse_u64(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) throw ConfigError(path, "must be non-negative");
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  if (!j.is_string()) throw ConfigError(path, "expected a 64-bit integer or hex string");
  const std::string s = j.get<std::string>();
  int base = 10;
  std::string_view digits = s;
  if (digits.starts_with("0x") || digits.starts_with("0X")) {
    base = 16;
    digits.remove_prefix(2);
  }
  std::uint64_t v = 0;
  const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), v, base);
  if (digits.empty() || res.ec != std::errc{} || res.ptr != digits.data() + digits.size())
    throw ConfigError(path, "cannot parse '" + s + "' as a 64-bit integer");
  return v;
}

json to_json(const WatermarkSpec& wm) {
  return json{{"method", to_string(wm.method)},
              {"policy", policy_to_json(wm.policy)},
              {"delta", wm.kgw.delta},
              {"gamma", wm.gamma},
              {"key", format_key(wm.key.value)}};
}

json to_json(const AttackSpec& a) {
  json j{{"kind", std::string(to_string(a.kind))},
         {"rate", a.rate},
         {"rng_seed", format_key(a.rng_seed)}};
  if (a.kind == AttackKind::kParaphrase) {
    j["endpoint"] = a.endpoint;
    j["timeout_ms"] = a.timeout_ms;
    j["retries"] = a.retries;
  }
  return j;
}

json to_json(const ExperimentConfig& c) {
  json attacks = json::array();
  for (const auto& a : c.attacks) attacks.push_back(to_json(a));
  json compare = json::array();
  for (const auto& w : c.compare) compare.push_back(to_json(w));
  return json{
      {"schema_version", c.schema_version},
      {"lm",
       {{"kind", lm_kind_name(c.lm.kind)},
        {"vocab_size", c.lm.vocab_size},
        {"order", c.lm.order},
        {"entropy_param", c.lm.entropy_param},
        {"seed", format_key(c.lm.seed)}}},
      {"sampler", {{"temperature", c.sampler.temperature}, {"top_p", c.sampler.top_p}}},
      {"watermark", to_json(c.watermark)},
      {"generation",
       {{"num_sequences", c.generation.num_sequences},
        {"length", c.generation.length},
        {"prompt_length", c.generation.prompt_length},
        {"rng_seed", format_key(c.generation.rng_seed)},
        {"clean_rng_seed", format_key(c.generation.clean_rng_seed)}}},
      {"attacks", attacks},
      {"metrics", {{"fpr_levels", c.metrics.fpr_levels}, {"z_threshold", c.metrics.z_threshold}}},
      {"compare", compare}};
}

WatermarkSpec watermark_from_json(const json& j, const std::string& path) {
  require_object(j, path, {"method", "policy", "delta", "gamma", "key"});
  WatermarkSpec wm;
  std::string method = to_string(wm.method);
  read_field(j, path, "method", method);
  wm.method = rethrow_as_config(path + ".method",
                                [&] { return parse_watermark_method(method); });
  if (j.contains("policy")) wm.policy = policy_from_json(j.at("policy"), path + ".policy");
  read_field(j, path, "delta", wm.kgw.delta);
  read_field(j, path, "gamma", wm.gamma);
  read_u64(j, path, "key", wm.key.value);
  return wm;
}

AttackSpec attack_from_json(const json& j, const std::string& path) {
  require_object(j, path, {"kind", "rate", "rng_seed", "endpoint", "timeout_ms", "retries"});
  AttackSpec a;
  std::string kind(to_string(a.kind));
  read_field(j, path, "kind", kind);
  a.kind = rethrow_as_config(path + ".kind", [&] { return parse_attack_kind(kind); });
  read_field(j, path, "rate", a.rate);
  read_u64(j, path, "rng_seed", a.rng_seed);
  read_field(j, path, "endpoint", a.endpoint);
  read_field(j, path, "timeout_ms", a.timeout_ms);
  read_field(j, path, "retries", a.retries);
  return a;
}

ExperimentConfig config_from_json(const json& j) {
  require_object(j, "$", {"schema_version", "lm", "sampler", "watermark", "generation",
                          "attacks", "metrics", "compare"});
  ExperimentConfig c;
  if (!j.contains("schema_version"))
    throw ConfigError("$.schema_version", "missing schema version");
  read_field(j, "$", "schema_version", c.schema_version);
  if (c.schema_version != kConfigSchemaVersion)
    throw ConfigError("$.schema_version",
                      "unsupported version " + std::to_string(c.schema_version));

  if (j.contains("lm")) {
    const auto& l = j.at("lm");
    require_object(l, "$.lm", {"kind", "vocab_size", "order", "entropy_param", "seed"});
    std::string kind = lm_kind_name(c.lm.kind);
    read_field(l, "$.lm", "kind", kind);
    if (kind == "chain") c.lm.kind = LmKind::kChain;
    else if (kind == "dirichlet") c.lm.kind = LmKind::kDirichlet;
    else throw ConfigError("$.lm.kind", "expected dirichlet or chain");
    read_field(l, "$.lm", "vocab_size", c.lm.vocab_size);
    read_field(l, "$.lm", "order", c.lm.order);
    read_field(l, "$.lm", "entropy_param", c.lm.entropy_param);
    read_u64(l, "$.lm", "seed", c.lm.seed);
  }
  if (j.contains("sampler")) {
    const auto& s = j.at("sampler");
    require_object(s, "$.sampler", {"temperature", "top_p"});
    read_field(s, "$.sampler", "temperature", c.sampler.temperature);
    read_field(s, "$.sampler", "top_p", c.sampler.top_p);
  }
  if (j.contains("watermark")) c.watermark = watermark_from_json(j.at("watermark"), "$.watermark");
  if (j.contains("generation")) {
    const auto& g = j.at("generation");
    require_object(g, "$.generation",
                   {"num_sequences", "length", "prompt_length", "rng_seed", "clean_rng_seed"});
    read_field(g, "$.generation", "num_sequences", c.generation.num_sequences);
    read_field(g, "$.generation", "length", c.generation.length);
    read_field(g, "$.generation", "prompt_length", c.generation.prompt_length);
    read_u64(g, "$.generation", "rng_seed", c.generation.rng_seed);
    c.generation.clean_rng_seed = c.generation.rng_seed ^ 0xC1EA0C0A95E5EED5ULL;
    read_u64(g, "$.generation", "clean_rng_seed", c.generation.clean_rng_seed);
  }
  if (j.contains("attacks")) {
    const auto& a = j.at("attacks");
    if (!a.is_array()) throw ConfigError("$.attacks", "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i)
      c.attacks.push_back(attack_from_json(a[i], "$.attacks[" + std::to_string(i) + "]"));
  }
  if (j.contains("metrics")) {
    const auto& m = j.at("metrics");
    require_object(m, "$.metrics", {"fpr_levels", "z_threshold"});
    if (m.contains("fpr_levels")) {
      const auto& f = m.at("fpr_levels");
      if (!f.is_array()) throw ConfigError("$.metrics.fpr_levels", "expected an array");
      c.metrics.fpr_levels.clear();
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f[i].is_number())
          throw ConfigError("$.metrics.fpr_levels[" + std::to_string(i) + "]",
                            "expected a number");
        c.metrics.fpr_levels.push_back(f[i].get<double>());
      }
    }
    read_field(m, "$.metrics", "z_threshold", c.metrics.z_threshold);
  }
  if (j.contains("compare")) {
    const auto& a = j.at("compare");
    if (!a.is_array()) throw ConfigError("$.compare", "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i)
      c.compare.push_back(watermark_from_json(a[i], "$.compare[" + std::to_string(i) + "]"));
  }
  c.validate();
  return c;
}

namespace {

void validate_watermark(const WatermarkSpec& wm, const std::string& path) {
  if (!(wm.gamma > 0.0 && wm.gamma < 1.0)) throw ConfigError(path + ".gamma", "must lie in (0, 1)");
  if (!(wm.kgw.delta >= 0.0)) throw ConfigError(path + ".delta", "must be non-negative");
  if (wm.method == WatermarkMethod::kMorphMark)
    rethrow_as_config(path + ".policy", [&] { wm.policy.validate(); return 0; });
}

}  // namespace

void ExperimentConfig::validate() const {
  if (lm.vocab_size < 2) throw ConfigError("$.lm.vocab_size", "must be at least 2");
  if (lm.order != 0 && lm.order != 1) throw ConfigError("$.lm.order", "must be 0 or 1");
  if (!(lm.entropy_param > 0.0)) throw ConfigError("$.lm.entropy_param", "must be positive");
  rethrow_as_config("$.sampler", [&] { sampler.validate(); return 0; });
  validate_watermark(watermark, "$.watermark");
  for (std::size_t i = 0; i < compare.size(); ++i)
    validate_watermark(compare[i], "$.compare[" + std::to_string(i) + "]");
  if (generation.length < 1) throw ConfigError("$.generation.length", "must be at least 1");
  if (generation.prompt_length < 1)
    throw ConfigError("$.generation.prompt_length", "must be at least 1");
  for (std::size_t i = 0; i < attacks.size(); ++i) {
    const auto& a = attacks[i];
    const std::string p = "$.attacks[" + std::to_string(i) + "]";
    if (a.kind == AttackKind::kDelete ? !(a.rate >= 0.0 && a.rate < 1.0)
                                      : !(a.rate >= 0.0 && a.rate <= 1.0))
      throw ConfigError(p + ".rate", "out of range");
    if (a.kind == AttackKind::kParaphrase && a.endpoint.empty())
      throw ConfigError(p + ".endpoint", "required for paraphrase");
  }
  for (std::size_t i = 0; i < metrics.fpr_levels.size(); ++i)
    if (!(metrics.fpr_levels[i] > 0.0 && metrics.fpr_levels[i] < 1.0))
      throw ConfigError("$.metrics.fpr_levels[" + std::to_string(i) + "]",
                        "must lie in (0, 1)");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace greenmark
