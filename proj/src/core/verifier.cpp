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

#include "core/verifier.hpp"

#include <cstdlib>
#include <fstream>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "core/error.hpp"

namespace kgxb {

std::vector<std::string> MockVerifier::simulate(std::span<const std::string> prompts) {
  ++batches_seen_;
  prompts_seen_ += prompts.size();
  std::vector<std::string> out;
  out.reserve(prompts.size());
  for (const std::string& p : prompts) out.push_back(policy_(p));
  return out;
}

MockVerifier::Policy silent_policy() {
  return [](const std::string&) { return std::string(); };
}

MockVerifier::Policy explanation_object_policy() {
  return [](const std::string& prompt) -> std::string {
    const auto view = parse_prompt(prompt);
    if (!view || view->explanation_text.empty()) return {};
    std::string_view line = view->explanation_text;
    line = line.substr(0, line.find('\n'));
    // "(s, p, o)" -> o
    const std::size_t comma = line.rfind(", ");
    if (comma == std::string_view::npos || !line.ends_with(")")) return {};
    return std::string(line.substr(comma + 2, line.size() - comma - 3));
  };
}

MockScript load_mock_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mock script " + path.string());
  MockScript script;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      script[j.at("query").get<std::string>()] =
          ScriptedAnswer{j.value("without", std::string()), j.value("with", std::string())};
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, std::string("mock script: ") + e.what());
    }
  }
  return script;
}

void save_mock_script(const MockScript& script, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& [query, answer] : script) {
    out << nlohmann::json{{"query", query}, {"without", answer.without}, {"with", answer.with}}
               .dump()
        << '\n';
  }
}

MockVerifier::Policy scripted_policy(MockScript script, MockVerifier::Policy fallback) {
  return [script = std::move(script), fallback = std::move(fallback)](
             const std::string& prompt) -> std::string {
    const auto view = parse_prompt(prompt);
    if (view) {
      auto it = script.find(view->query_line);
      if (it != script.end()) {
        return view->explanation_text.empty() ? it->second.without : it->second.with;
      }
    }
    return fallback ? fallback(prompt) : std::string();
  };
}

RemoteVerifier::RemoteVerifier(RemoteVerifierOptions options) : options_(std::move(options)) {
  const std::size_t scheme = options_.url.find("://");
  if (scheme == std::string::npos) {
    throw ConfigError("verifier url must start with http:// or https://");
  }
  const std::size_t slash = options_.url.find('/', scheme + 3);
  origin_ = options_.url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : options_.url.substr(slash);
}

std::string RemoteVerifier::request_body(const RemoteVerifierOptions& options,
                                         const std::string& prompt) {
  const nlohmann::json body{
      {"model", options.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", 0},
      {"max_tokens", options.max_tokens}};
  return body.dump();
}

std::string RemoteVerifier::answer(const std::string& prompt) const {
  httplib::Client client(origin_);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      options_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());
  httplib::Headers headers;
  if (const char* key = std::getenv(options_.api_key_env.c_str()); key != nullptr && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto res = client.Post(path_, headers, request_body(options_, prompt), "application/json");
  if (!res) {
    throw TransportError("verifier request to " + options_.url +
                         " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("verifier returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed verifier response: ") + e.what());
  }
}

std::vector<std::string> RemoteVerifier::simulate(std::span<const std::string> prompts) {
  std::vector<std::string> out;
  out.reserve(prompts.size());
  for (const std::string& p : prompts) out.push_back(answer(p));
  return out;
}

}  // namespace kgxb
