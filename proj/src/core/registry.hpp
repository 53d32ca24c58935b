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

// Name-keyed factories for explainers and verifiers. The engine resolves
// every method and backend through here, so new ones plug in by registering
// a factory before the run starts.

#ifndef KGXBENCH_CORE_REGISTRY_HPP_
#define KGXBENCH_CORE_REGISTRY_HPP_

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/fsv.hpp"
#include "core/lpx.hpp"

namespace kgxb {

using ExplainFn = std::function<std::vector<ExplanationResult>(
    std::span<const Triple> predictions, const KnowledgeGraph& kg, const KgeModel& model,
    const LpxConfig& config, int threads)>;

struct Explainer {
  ExplainFn explain;
  Verbalizer verbalizer;  // empty means verbalize()
};

using ExplainerFactory = std::function<Explainer()>;

// `options` is the verifier object of the run configuration, e.g.
// {"kind": "mock", "script": "answers.jsonl"}.
using VerifierFactory =
    std::function<std::shared_ptr<Verifier>(const nlohmann::json& options)>;

class Registry {
 public:
  // Holds the built-in explainers and verifiers ("mock", "remote").
  static Registry& instance();

  void register_explainer(const std::string& name, ExplainerFactory factory);
  void register_verifier(const std::string& name, VerifierFactory factory);

  bool has_explainer(const std::string& name) const;
  // Throw ConfigError for unknown names.
  Explainer explainer(const std::string& name) const;
  std::shared_ptr<Verifier> verifier(const std::string& name,
                                     const nlohmann::json& options) const;

  std::vector<std::string> explainer_names() const;
  std::vector<std::string> verifier_names() const;

 private:
  Registry();

  mutable std::mutex mu_;
  std::map<std::string, ExplainerFactory> explainers_;
  std::map<std::string, VerifierFactory> verifiers_;
};

}  // namespace kgxb

#endif  // KGXBENCH_CORE_REGISTRY_HPP_
