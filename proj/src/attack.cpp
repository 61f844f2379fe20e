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

#include "greenmark/attack.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include <httplib.h>
#include <json.hpp>

#include "greenmark/error.hpp"
#include "greenmark/splitmix64.hpp"

namespace greenmark {

std::string_view to_string(AttackKind kind) noexcept {
  switch (kind) {
    case AttackKind::kSubstitute: return "substitute";
    case AttackKind::kDelete: return "delete";
    case AttackKind::kParaphrase: return "paraphrase";
  }
  return "?";
}

AttackKind parse_attack_kind(std::string_view name) {
  if (name == "substitute") return AttackKind::kSubstitute;
  if (name == "delete") return AttackKind::kDelete;
  if (name == "paraphrase") return AttackKind::kParaphrase;
  throw ParameterError("unknown attack kind '" + std::string(name) + "'");
}

std::string AttackSpec::label() const {
  if (kind == AttackKind::kParaphrase) return "paraphrase";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, rate);
  return std::string(to_string(kind)) + std::string(buf, res.ptr);
}

std::size_t attacked_count(std::size_t n, double rate) {
  return static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
}

namespace {

// First `count` entries of a Fisher-Yates shuffle of [0, n).
std::vector<std::size_t> choose_positions(std::size_t n, std::size_t count,
                                          SplitMix64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i)
    std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(count);
  return idx;
}

}  // namespace

std::vector<TokenId> substitute(std::span<const TokenId> tokens, double rate,
                                std::uint64_t rng_seed, std::size_t vocab_size) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw ParameterError("substitution rate must lie in [0, 1]");
  if (vocab_size < 2) throw ParameterError("vocab_size must be at least 2");

  std::vector<TokenId> out(tokens.begin(), tokens.end());
  SplitMix64 rng(rng_seed);
  for (std::size_t pos :
       choose_positions(out.size(), attacked_count(out.size(), rate), rng)) {
    auto repl = static_cast<TokenId>(rng.below(vocab_size - 1));
    if (repl >= out[pos]) ++repl;
    out[pos] = repl;
  }
  return out;
}

std::vector<TokenId> delete_tokens(std::span<const TokenId> tokens, double rate,
                                   std::uint64_t rng_seed) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw ParameterError("deletion rate must lie in [0, 1)");
  SplitMix64 rng(rng_seed);
  std::vector<std::uint8_t> drop(tokens.size(), 0);
  for (std::size_t pos :
       choose_positions(tokens.size(), attacked_count(tokens.size(), rate), rng))
    drop[pos] = 1;
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (!drop[i]) out.push_back(tokens[i]);
  return out;
}

ParaphraseEndpoint parse_endpoint(std::string_view descriptor) {
  constexpr std::string_view kScheme = "http://";
  if (descriptor.substr(0, kScheme.size()) != kScheme)
    throw AttackUnavailable("paraphrase endpoint must start with http://, got '" +
                            std::string(descriptor) + "'");
  const auto slash = descriptor.find('/', kScheme.size());
  ParaphraseEndpoint ep;
  ep.scheme_host_port = std::string(descriptor.substr(0, slash));
  if (slash != std::string_view::npos) ep.path = std::string(descriptor.substr(slash));
  if (ep.scheme_host_port.size() == kScheme.size())
    throw AttackUnavailable("paraphrase endpoint has no host");
  return ep;
}

std::vector<TokenId> paraphrase(std::span<const TokenId> tokens,
                                std::string_view endpoint_descriptor,
                                int timeout_ms, int retries) {
  const ParaphraseEndpoint ep = parse_endpoint(endpoint_descriptor);
  httplib::Client client(ep.scheme_host_port);
  const auto secs = timeout_ms / 1000;
  const auto usecs = (timeout_ms % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  const std::string body =
      nlohmann::json{{"text_tokens", std::vector<TokenId>(tokens.begin(), tokens.end())}}
          .dump();

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= std::max(0, retries); ++attempt) {
    auto res = client.Post(ep.path, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw AttackUnavailable("paraphrase endpoint returned status " +
                              std::to_string(res->status));
    try {
      const auto reply = nlohmann::json::parse(res->body);
      std::vector<TokenId> out;
      for (const auto& v : reply.at("text_tokens")) {
        const auto id = v.get<std::int64_t>();
        if (id < 0 || id > static_cast<std::int64_t>(UINT32_MAX))
          throw AttackUnavailable("token id out of range in paraphrase reply");
        out.push_back(static_cast<TokenId>(id));
      }
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw AttackUnavailable(std::string("malformed paraphrase reply: ") + e.what());
    }
  }
  throw AttackUnavailable("paraphrase endpoint " + std::string(endpoint_descriptor) +
                          " unavailable (" + last_error + ")");
}

std::vector<TokenId> apply_attack(std::span<const TokenId> tokens,
                                  const AttackSpec& spec, std::size_t vocab_size,
                                  std::uint64_t sequence_index) {
  const std::uint64_t seed = splitmix64(spec.rng_seed + sequence_index);
  switch (spec.kind) {
    case AttackKind::kSubstitute: return substitute(tokens, spec.rate, seed, vocab_size);
    case AttackKind::kDelete: return delete_tokens(tokens, spec.rate, seed);
    case AttackKind::kParaphrase:
      return paraphrase(tokens, spec.endpoint, spec.timeout_ms, spec.retries);
  }
  return {tokens.begin(), tokens.end()};
}

}  // namespace greenmark
