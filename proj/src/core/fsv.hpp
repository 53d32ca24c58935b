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

// Forward simulatability protocol: prompt construction, answer matching,
// the correctness indicator and the per-explanation variation, plus batched
// evaluation through a Verifier.

#ifndef KGXBENCH_CORE_FSV_HPP_
#define KGXBENCH_CORE_FSV_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "core/fsv_vector.hpp"
#include "core/kg.hpp"
#include "core/kge.hpp"
#include "core/lpx.hpp"

namespace kgxb {

enum class Prompting { kZeroShot, kFewShot };

std::string_view prompting_name(Prompting p);

struct EvalConfig {
  Prompting prompting = Prompting::kZeroShot;
  bool constrained = false;
  int n_examples = 5;
  int constraint_size = 16;
  std::string llm_model = "Llama3.1";
  int batch_size = 8;
  std::uint64_t seed = 0;

  // Throws ConfigError when a size is out of range (m >= 2 if constrained).
  void validate() const;
};

struct Prompt {
  std::string text;
  Query query;
  bool with_explanation = false;
};

using Verbalizer = std::function<std::string(const KnowledgeGraph&, const Explanation&)>;

// One "(subject, predicate, object)" line per triple, in canonical order.
std::string verbalize(const KnowledgeGraph& kg, const Explanation& explanation);

// Solved queries shown to the verifier in few-shot mode: train triples with
// the query predicate (never the query's own subject/predicate pair), padded
// from the rest of the train split when there are too few.
std::vector<Triple> select_fewshot(const KnowledgeGraph& kg, Query query, int n,
                                   std::uint64_t seed);

// The top-m entities for the query (same filtering as lp, so the lp answer is
// always included), in a seeded shuffled order.
std::vector<EntityId> constraint_entities(const KgeModel& model, const KnowledgeGraph& kg,
                                          Query query, int m, std::uint64_t seed);

Prompt build_prompt(const KnowledgeGraph& kg, const KgeModel& model, Query query,
                    std::string_view explanation_text, const EvalConfig& config);

// Locates the query line and explanation lines in a prompt built by
// build_prompt; used by scripted verifiers.
struct PromptView {
  std::string query_line;
  std::string explanation_text;
};
std::optional<PromptView> parse_prompt(std::string_view text);

// Trim, strip surrounding punctuation, lowercase, whitespace runs -> '_'.
std::string normalize_answer(std::string_view raw);

class AnswerMatcher {
 public:
  explicit AnswerMatcher(const KnowledgeGraph& kg);
  // Smallest entity id whose normalized label equals the normalized answer.
  std::optional<EntityId> match(std::string_view raw) const;

 private:
  std::unordered_map<std::string, EntityId> index_;
};

std::optional<EntityId> match_answer(const KnowledgeGraph& kg, std::string_view raw_answer);

int indicator(EntityId lp_answer, std::optional<EntityId> matched);

// i_with - i_without. Throws ArgumentError outside {0, 1}.
int fsv_of(int i_without, int i_with);

class Verifier {
 public:
  virtual ~Verifier() = default;
  // One raw answer per prompt, in order. Must tolerate concurrent calls.
  // Throws TransportError when the backend cannot be reached.
  virtual std::vector<std::string> simulate(std::span<const std::string> prompts) = 0;
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  double multiplier = 2.0;
};

struct EvaluateOptions {
  RetryPolicy retry;
  int max_in_flight = 1;
  Verbalizer verbalizer;  // defaults to verbalize()
  std::function<void(const std::string&)> log;  // defaults to stderr
};

struct EvaluationRecord {
  Triple prediction;
  EntityId lp_answer;
  std::string raw_without;
  std::string raw_with;
  int correct_without = 0;
  int correct_with = 0;
  int fsv = 0;
  bool failed_without = false;
  bool failed_with = false;
};

// Builds the with/without prompts for every item, sends them through the
// verifier in batches of config.batch_size and scores each pair.
std::vector<EvaluationRecord> evaluate(std::span<const Triple> predictions,
                                       std::span<const Explanation> explanations,
                                       const KnowledgeGraph& kg, const KgeModel& model,
                                       Verifier& verifier, const EvalConfig& config,
                                       const EvaluateOptions& options = {});

FsvVector fsv_vector(std::span<const EvaluationRecord> records);

}  // namespace kgxb

#endif  // KGXBENCH_CORE_FSV_HPP_
