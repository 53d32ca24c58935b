// Copyright 2026 The kgxbench Authors
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

#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <doctest.h>
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "core/error.hpp"
#include "core/registry.hpp"
#include "core/verifier.hpp"
#include "support/prompt_fixture.hpp"
#include "support/toy.hpp"

namespace kgxb {
namespace {

using nlohmann::json;

class ChatServer {
 public:
  ChatServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                 httplib::Response& res) {
      std::lock_guard<std::mutex> lock(mu_);
      bodies.push_back(req.body);
      auth.push_back(req.get_header_value("Authorization"));
      if (status != 200) {
        res.status = status;
        return;
      }
      if (malformed) {
        res.set_content("{\"nope\":1}", "application/json");
        return;
      }
      const auto j = json::parse(req.body);
      const std::string prompt = j["messages"][0]["content"];
      const json reply = {
          {"choices", json::array({{{"message", {{"role", "assistant"},
                                                  {"content", "echo:" + std::to_string(prompt.size())}}}}})}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~ChatServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }

  std::vector<std::string> bodies;
  std::vector<std::string> auth;
  int status = 200;
  bool malformed = false;

 private:
  httplib::Server server_;
  std::thread thread_;
  std::mutex mu_;
  int port_ = 0;
};

TEST_CASE("mock verifier counts prompts and batches") {
  MockVerifier v([](const std::string& p) { return "got " + p; });
  const std::vector<std::string> prompts = {"a", "b", "c"};
  CHECK(v.simulate(prompts) == std::vector<std::string>{"got a", "got b", "got c"});
  CHECK(v.prompts_seen() == 3);
  CHECK(v.batches_seen() == 1);
}

TEST_CASE("explanation object policy answers the first explanation object") {
  testing::PromptFixture f;
  const auto policy = explanation_object_policy();
  const std::string with =
      build_prompt(f.kg, f.model, f.query, verbalize(f.kg, f.explanation), EvalConfig{}).text;
  CHECK(policy(with) == "James_I_of_England");
  CHECK(policy(build_prompt(f.kg, f.model, f.query, "", EvalConfig{}).text).empty());
}

TEST_CASE("mock scripts round trip and drive answers by query line") {
  testing::TempDir dir;
  MockScript script;
  script["(Elizabeth_of_Bohemia, sibling_of, ?)"] = {"Henry_Frederick", "Charles_I_of_England"};
  save_mock_script(script, dir.path() / "script.jsonl");
  const MockScript back = load_mock_script(dir.path() / "script.jsonl");
  REQUIRE(back.size() == 1);
  CHECK(back.begin()->second.with == "Charles_I_of_England");

  testing::PromptFixture f;
  const auto policy = scripted_policy(back, [](const std::string&) { return "fallback"; });
  const std::string text = verbalize(f.kg, f.explanation);
  CHECK(policy(build_prompt(f.kg, f.model, f.query, "", EvalConfig{}).text) == "Henry_Frederick");
  CHECK(policy(build_prompt(f.kg, f.model, f.query, text, EvalConfig{}).text) ==
        "Charles_I_of_England");
  const Query other{*f.kg.find_entity("Henry_Frederick"), f.query.predicate};
  CHECK(policy(build_prompt(f.kg, f.model, other, "", EvalConfig{}).text) == "fallback");

  std::ofstream(dir.path() / "bad.jsonl") << "{not json\n";
  CHECK_THROWS_AS(load_mock_script(dir.path() / "bad.jsonl"), ParseError);
  CHECK_THROWS_AS(load_mock_script(dir.path() / "missing.jsonl"), IoError);
}

TEST_CASE("remote verifier request body") {
  RemoteVerifierOptions o;
  o.model = "m1";
  o.max_tokens = 7;
  const json j = json::parse(RemoteVerifier::request_body(o, "hello"));
  CHECK(j["model"] == "m1");
  CHECK(j["messages"][0]["role"] == "user");
  CHECK(j["messages"][0]["content"] == "hello");
  CHECK(j["temperature"] == 0);
  CHECK(j["max_tokens"] == 7);
}

TEST_CASE("remote verifier talks to a chat completion endpoint") {
  ChatServer server;
  ::setenv("KGXBENCH_TEST_KEY", "sekret", 1);
  RemoteVerifierOptions o;
  o.url = server.url();
  o.api_key_env = "KGXBENCH_TEST_KEY";
  o.timeout = std::chrono::milliseconds(5000);
  RemoteVerifier v(o);
  const std::vector<std::string> prompts = {"abc", "hello"};
  CHECK(v.simulate(prompts) == std::vector<std::string>{"echo:3", "echo:5"});
  REQUIRE(server.auth.size() == 2);
  CHECK(server.auth[0] == "Bearer sekret");
  CHECK(json::parse(server.bodies[1])["messages"][0]["content"] == "hello");
  ::unsetenv("KGXBENCH_TEST_KEY");

  server.status = 503;
  CHECK_THROWS_AS(v.simulate(prompts), TransportError);
  server.status = 200;
  server.malformed = true;
  CHECK_THROWS_AS(v.simulate(prompts), TransportError);
}

TEST_CASE("remote verifier: unreachable endpoint and bad url") {
  RemoteVerifierOptions o;
  o.url = "http://127.0.0.1:1/v1/chat/completions";
  o.timeout = std::chrono::milliseconds(500);
  RemoteVerifier v(o);
  const std::vector<std::string> prompts = {"x"};
  CHECK_THROWS_AS(v.simulate(prompts), TransportError);
  RemoteVerifierOptions bad;
  bad.url = "localhost:8000";
  CHECK_THROWS_AS(RemoteVerifier{bad}, ConfigError);
}

TEST_CASE("registry: built-ins, unknown names, custom entries") {
  Registry& r = Registry::instance();
  for (const char* name : {"random_subject", "random_predicate", "random_object",
                           "single_triple", "neighborhood"}) {
    CHECK(r.has_explainer(name));
  }
  CHECK_THROWS_AS(r.explainer("nope"), ConfigError);
  CHECK_THROWS_AS(r.verifier("nope", json::object()), ConfigError);
  CHECK_THROWS_AS(r.verifier("remote", json::object()), ConfigError);
  CHECK_THROWS_AS(r.verifier("mock", json{{"policy", "chatty"}}), ConfigError);
  CHECK(r.verifier("mock", json::object()) != nullptr);
  CHECK(r.verifier("remote", json{{"url", "http://127.0.0.1:1/x"}}) != nullptr);

  r.register_explainer("test_first_triple", [] {
    Explainer e;
    e.explain = [](std::span<const Triple> preds, const KnowledgeGraph& kg, const KgeModel&,
                   const LpxConfig&, int) {
      std::vector<ExplanationResult> out;
      for (const Triple& p : preds) {
        out.push_back({p, Explanation::of({kg.incident_train(p.subject).front()}), 1.0, ""});
      }
      return out;
    };
    e.verbalizer = [](const KnowledgeGraph&, const Explanation& x) {
      return "custom:" + std::to_string(x.size());
    };
    return e;
  });
  CHECK(r.has_explainer("test_first_triple"));
  const Explainer e = r.explainer("test_first_triple");
  CHECK(e.verbalizer(testing::PromptFixture{}.kg, Explanation{}) == "custom:0");
  const auto names = r.explainer_names();
  CHECK(std::find(names.begin(), names.end(), "test_first_triple") != names.end());
  const auto vnames = r.verifier_names();
  CHECK(std::find(vnames.begin(), vnames.end(), "mock") != vnames.end());
}

}  // namespace
}  // namespace kgxb
