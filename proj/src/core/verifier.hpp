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

// Verifier backends: an in-process mock driven by a policy or a script
// table, and a chat-completion HTTP client.

#ifndef KGXBENCH_CORE_VERIFIER_HPP_
#define KGXBENCH_CORE_VERIFIER_HPP_

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <utility>

#include "core/fsv.hpp"

namespace kgxb {

class MockVerifier : public Verifier {
 public:
  using Policy = std::function<std::string(const std::string& prompt)>;

  explicit MockVerifier(Policy policy) : policy_(std::move(policy)) {}

  std::vector<std::string> simulate(std::span<const std::string> prompts) override;

  std::size_t prompts_seen() const { return prompts_seen_.load(); }
  std::size_t batches_seen() const { return batches_seen_.load(); }

 private:
  Policy policy_;
  std::atomic<std::size_t> prompts_seen_{0};
  std::atomic<std::size_t> batches_seen_{0};
};

// Always answers the empty string.
MockVerifier::Policy silent_policy();
// Answers the object of the first explanation line when an explanation is
// present, otherwise the empty string.
MockVerifier::Policy explanation_object_policy();

// Answers keyed by query line, e.g. "(a, r, ?)".
struct ScriptedAnswer {
  std::string without;
  std::string with;
};
using MockScript = std::map<std::string, ScriptedAnswer>;

// JSON lines: {"query": "(a, r, ?)", "without": "...", "with": "..."}.
MockScript load_mock_script(const std::filesystem::path& path);
void save_mock_script(const MockScript& script, const std::filesystem::path& path);

// Script lookup; prompts whose query is not scripted fall through to
// `fallback`.
MockVerifier::Policy scripted_policy(MockScript script, MockVerifier::Policy fallback);

struct RemoteVerifierOptions {
  std::string url;  // full endpoint, e.g. http://localhost:8000/v1/chat/completions
  std::string model = "Llama3.1";
  std::string api_key_env = "KGXBENCH_API_KEY";
  std::chrono::milliseconds timeout{60000};
  int max_tokens = 32;
};

// One chat-completion request per prompt:
//   {"model", "messages": [{"role": "user", "content"}], "temperature": 0,
//    "max_tokens"}
// and the answer is choices[0].message.content. Any transport problem, non-2xx
// status or malformed body raises TransportError.
class RemoteVerifier : public Verifier {
 public:
  explicit RemoteVerifier(RemoteVerifierOptions options);

  std::vector<std::string> simulate(std::span<const std::string> prompts) override;

  // Serialized request body for one prompt.
  static std::string request_body(const RemoteVerifierOptions& options,
                                  const std::string& prompt);

 private:
  std::string answer(const std::string& prompt) const;

  RemoteVerifierOptions options_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
};

}  // namespace kgxb

#endif  // KGXBENCH_CORE_VERIFIER_HPP_
