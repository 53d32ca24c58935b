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

#include "core/registry.hpp"

#include <chrono>

#include "core/error.hpp"
#include "core/verifier.hpp"

namespace kgxb {
namespace {

Explainer builtin_explainer() {
  return Explainer{
      [](std::span<const Triple> predictions, const KnowledgeGraph& kg, const KgeModel& model,
         const LpxConfig& config, int threads) {
        return explain(predictions, kg, model, config, threads);
      },
      {}};
}

MockVerifier::Policy named_policy(const std::string& name) {
  if (name == "silent") return silent_policy();
  if (name == "explanation_object") return explanation_object_policy();
  throw ConfigError("unknown mock policy '" + name + "'");
}

std::shared_ptr<Verifier> make_mock(const nlohmann::json& options) {
  MockVerifier::Policy fallback = named_policy(options.value("policy", std::string("silent")));
  const std::string script = options.value("script", std::string());
  if (script.empty()) return std::make_shared<MockVerifier>(std::move(fallback));
  return std::make_shared<MockVerifier>(
      scripted_policy(load_mock_script(script), std::move(fallback)));
}

std::shared_ptr<Verifier> make_remote(const nlohmann::json& options) {
  RemoteVerifierOptions o;
  o.url = options.value("url", std::string());
  if (o.url.empty()) throw ConfigError("remote verifier needs a url");
  o.model = options.value("model", o.model);
  o.api_key_env = options.value("api_key_env", o.api_key_env);
  o.timeout = std::chrono::milliseconds(options.value("timeout_ms", o.timeout.count()));
  o.max_tokens = options.value("max_tokens", o.max_tokens);
  return std::make_shared<RemoteVerifier>(std::move(o));
}

}  // namespace

Registry::Registry() {
  for (LpxMethod m : {LpxMethod::kRandomSubject, LpxMethod::kRandomPredicate,
                      LpxMethod::kRandomObject, LpxMethod::kSingleTriple,
                      LpxMethod::kNeighborhood}) {
    explainers_.emplace(std::string(lpx_method_name(m)), builtin_explainer);
  }
  verifiers_.emplace("mock", make_mock);
  verifiers_.emplace("remote", make_remote);
}

Registry& Registry::instance() {
  static Registry registry;
  return registry;
}

void Registry::register_explainer(const std::string& name, ExplainerFactory factory) {
  if (name.empty() || !factory) throw ArgumentError("explainer needs a name and a factory");
  std::lock_guard lock(mu_);
  explainers_[name] = std::move(factory);
}

void Registry::register_verifier(const std::string& name, VerifierFactory factory) {
  if (name.empty() || !factory) throw ArgumentError("verifier needs a name and a factory");
  std::lock_guard lock(mu_);
  verifiers_[name] = std::move(factory);
}

bool Registry::has_explainer(const std::string& name) const {
  std::lock_guard lock(mu_);
  return explainers_.contains(name);
}

Explainer Registry::explainer(const std::string& name) const {
  ExplainerFactory factory;
  {
    std::lock_guard lock(mu_);
    auto it = explainers_.find(name);
    if (it == explainers_.end()) throw ConfigError("unknown explanation method '" + name + "'");
    factory = it->second;
  }
  return factory();
}

std::shared_ptr<Verifier> Registry::verifier(const std::string& name,
                                             const nlohmann::json& options) const {
  VerifierFactory factory;
  {
    std::lock_guard lock(mu_);
    auto it = verifiers_.find(name);
    if (it == verifiers_.end()) throw ConfigError("unknown verifier '" + name + "'");
    factory = it->second;
  }
  return factory(options);
}

std::vector<std::string> Registry::explainer_names() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [name, _] : explainers_) out.push_back(name);
  return out;
}

std::vector<std::string> Registry::verifier_names() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [name, _] : verifiers_) out.push_back(name);
  return out;
}

}  // namespace kgxb
