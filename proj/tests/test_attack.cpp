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

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "greenmark/attack.hpp"
#include "greenmark/detect.hpp"
#include "greenmark/error.hpp"
#include "greenmark/experiment.hpp"
#include "greenmark/splitmix64.hpp"

using namespace greenmark;

namespace {

std::vector<TokenId> random_tokens(std::size_t n, std::size_t vocab, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<TokenId> t(n);
  for (auto& x : t) x = static_cast<TokenId>(rng.below(vocab));
  return t;
}

std::size_t differing(const std::vector<TokenId>& a, const std::vector<TokenId>& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

// In-process paraphrase server on an ephemeral port.
class MockServer {
 public:
  explicit MockServer(std::function<std::vector<TokenId>(std::vector<TokenId>)> rewrite) {
    server_.Post("/paraphrase", [rewrite](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body);
      const auto out = rewrite(body.at("text_tokens").get<std::vector<TokenId>>());
      res.set_content(nlohmann::json{{"text_tokens", out}}.dump(), "application/json");
    });
    server_.Post("/garbage", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"nope\": 1}", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }
  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("substitute") {
  const auto t = random_tokens(100, 50, 1);
  CHECK(substitute(t, 0.0, 9, 50) == t);
  const auto s = substitute(t, 0.3, 9, 50);
  CHECK(s.size() == t.size());
  CHECK(differing(t, s) == 30);
  CHECK(substitute(t, 0.3, 9, 50) == s);

  const auto bits = random_tokens(37, 2, 2);
  const auto flipped = substitute(bits, 1.0, 3, 2);
  for (std::size_t i = 0; i < bits.size(); ++i) CHECK(flipped[i] == 1 - bits[i]);

  CHECK_THROWS_AS(substitute(t, 1.5, 1, 50), ParameterError);
  CHECK_THROWS_AS(substitute(t, 0.5, 1, 1), ParameterError);
}

TEST_CASE("rate exactness across lengths") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = rng.below(400);
    const double rate = rng.uniform();
    const auto t = random_tokens(n, 100, trial);
    CHECK(differing(t, substitute(t, rate, trial, 100)) == attacked_count(n, rate));
    if (rate < 1.0) CHECK(delete_tokens(t, rate, trial).size() == n - attacked_count(n, rate));
  }
  CHECK(attacked_count(10, 0.25) == 3);  // 2.5 rounds away from zero
}

TEST_CASE("delete") {
  const auto t = random_tokens(10, 1000, 4);
  CHECK(delete_tokens(t, 0.0, 1) == t);
  const auto d = delete_tokens(t, 0.3, 1);
  REQUIRE(d.size() == 7);
  // Survivors appear in their original order.
  std::size_t j = 0;
  for (TokenId x : t)
    if (j < d.size() && d[j] == x) ++j;
  CHECK(j == d.size());
  CHECK_THROWS_AS(delete_tokens(t, 1.0, 1), ParameterError);

  // Detection on the shortened sequence colors its own adjacent pairs.
  const auto rep = score_sequence(d, WatermarkKey{7}, 0.5, 1000);
  CHECK(rep.total_scored == 6);
  CHECK(rep.per_position_colors[0] ==
        partition_for(WatermarkKey{7}, d[0], 1000, 0.5).is_green(d[1]));
}

TEST_CASE("damage grows with substitution rate") {
  const auto lm = build_lm(1000, 1, 1.0, 0x5EED0001);
  GenerationSpec gen;
  gen.num_sequences = 200;
  WatermarkSpec wm;
  const auto traces = generate_corpus(lm, wm, {}, gen, 17);
  double prev = 1e9;
  for (double rate : {0.1, 0.3, 0.5}) {
    double zsum = 0.0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto attacked = substitute(traces[i].tokens, rate, splitmix64(i), 1000);
      zsum += score_sequence(attacked, wm.key, 0.5, 1000).z;
    }
    const double mean_z = zsum / double(traces.size());
    CHECK(mean_z <= prev);
    prev = mean_z;
  }
}

TEST_CASE("paraphrase against an echo endpoint is the identity") {
  MockServer server([](std::vector<TokenId> t) { return t; });
  const auto t = random_tokens(64, 500, 5);
  CHECK(paraphrase(t, server.url("/paraphrase")) == t);
  AttackSpec spec;
  spec.kind = AttackKind::kParaphrase;
  spec.endpoint = server.url("/paraphrase");
  CHECK(apply_attack(t, spec, 500) == t);
}

TEST_CASE("server-side substitution matches the local attack") {
  SplitMix64 server_rng(1000);
  MockServer server([&](std::vector<TokenId> t) {
    return substitute(t, 0.3, server_rng.next(), 1000);
  });
  const auto lm = build_lm(1000, 1, 1.0, 0x5EED0001);
  GenerationSpec gen;
  gen.num_sequences = 100;
  WatermarkSpec wm;
  const auto traces = generate_corpus(lm, wm, {}, gen, 5);
  double z_remote = 0.0, z_local = 0.0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i].tokens;
    const auto remote = paraphrase(t, server.url("/paraphrase"));
    const auto local = substitute(t, 0.3, splitmix64(i + 77), 1000);
    CHECK(differing(t, remote) == differing(t, local));
    z_remote += score_sequence(remote, wm.key, 0.5, 1000).z;
    z_local += score_sequence(local, wm.key, 0.5, 1000).z;
  }
  // Same attack distribution: means agree to within Monte-Carlo noise
  // (per-sequence z sd is about 1.2, so the mean differs by ~0.17 sd).
  CHECK(std::abs(z_remote - z_local) / double(traces.size()) < 0.5);
}

TEST_CASE("paraphrase failures surface as AttackUnavailable") {
  const std::vector<TokenId> t{1, 2, 3};
  // Port 9 (discard) on localhost: nothing listens there in the sandbox.
  CHECK_THROWS_AS(paraphrase(t, "http://127.0.0.1:9/x", 200, 1), AttackUnavailable);
  CHECK_THROWS_AS(paraphrase(t, "ftp://example/x"), AttackUnavailable);
  MockServer server([](std::vector<TokenId> v) { return v; });
  CHECK_THROWS_AS(paraphrase(t, server.url("/garbage")), AttackUnavailable);
  CHECK_THROWS_AS(paraphrase(t, server.url("/missing")), AttackUnavailable);
}

TEST_CASE("endpoint parsing and labels") {
  const auto ep = parse_endpoint("http://localhost:8080/v1/rewrite");
  CHECK(ep.scheme_host_port == "http://localhost:8080");
  CHECK(ep.path == "/v1/rewrite");
  CHECK(parse_endpoint("http://h").path == "/");
  AttackSpec s;
  s.rate = 0.3;
  CHECK(s.label() == "substitute0.3");
  s.kind = AttackKind::kDelete;
  CHECK(s.label() == "delete0.3");
  CHECK(parse_attack_kind("paraphrase") == AttackKind::kParaphrase);
}
