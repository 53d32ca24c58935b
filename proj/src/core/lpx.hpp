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

// Explanation search for link predictions, framed as picking the best
// element of a finite candidate set under a relevance objective.

#ifndef KGXBENCH_CORE_LPX_HPP_
#define KGXBENCH_CORE_LPX_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/kg.hpp"
#include "core/kge.hpp"

namespace kgxb {

enum class LpxMethod {
  kRandomSubject,
  kRandomPredicate,
  kRandomObject,
  kSingleTriple,
  kNeighborhood,
};

std::string_view lpx_method_name(LpxMethod method);
std::optional<LpxMethod> parse_lpx_method(std::string_view name);

enum class RelevanceMode { kNecessary, kSufficient };

std::string_view relevance_mode_name(RelevanceMode mode);

struct LpxConfig {
  // Registry key; the built-in keys are the lpx_method_name() spellings.
  std::string method = "neighborhood";
  RelevanceMode mode = RelevanceMode::kNecessary;
  int k = 4;
  int prefilter_size = 20;
  bool summarize = false;
  int comparison_limit = 10;
  std::uint64_t seed = 0;
  PostTrainOptions post_train;

  // Throws ConfigError unless k >= 1, prefilter_size >= k, comparison_limit >= 1.
  void validate() const;
  // k, forced to 1 for the single-triple method.
  int effective_k() const;
};

// A canonical (sorted, duplicate-free) set of train triples.
struct Explanation {
  std::vector<Triple> triples;

  static Explanation of(std::vector<Triple> triples);
  bool empty() const { return triples.empty(); }
  std::size_t size() const { return triples.size(); }
  auto operator<=>(const Explanation&) const = default;
};

struct CandidateSet {
  Triple prediction;
  std::vector<Explanation> candidates;
};

// One uniform sample (without replacement, seeded by config.seed and the
// prediction) of min(k, pool) train triples featuring the prediction's
// subject, predicate or object. Empty pool gives an empty set.
CandidateSet baseline_candidates(const KnowledgeGraph& kg, const Triple& prediction,
                                 const LpxConfig& config);

// Number of undirected train walks of length <= 2 from `from` to `to`
// (a length-0 walk counts when from == to).
std::size_t path_fit_score(const KnowledgeGraph& kg, EntityId from, EntityId to);

// Groups triples around `focus` by (predicate, direction) and keeps the
// smallest triple per far-endpoint degree bucket {1}, {2..4}, {5+}.
std::vector<Triple> summarize(const KnowledgeGraph& kg, EntityId focus,
                              std::span<const Triple> subgraph);

// The top prefilter_size train triples around the subject (ranked by
// path_fit_score of their far endpoint to the object, ties by triple order),
// combined into every subset of size 1..k, size-major then lexicographic.
CandidateSet kelpie_candidates(const KnowledgeGraph& kg, const Triple& prediction,
                               const LpxConfig& config);

// Up to `limit` entities c, ascending, with lp(<c, p, ?>) != o.
std::vector<EntityId> comparison_set(const KgeModel& model, const KnowledgeGraph& kg,
                                     const Triple& prediction, std::size_t limit);

// Necessary: rank after post-training without the candidate minus the
// original rank. Sufficient: mean rank improvement of <c, p, o> after
// transplanting the candidate onto each c of the comparison set.
double relevance(const KgeModel& model, const KnowledgeGraph& kg, const Triple& prediction,
                 const Explanation& candidate, RelevanceMode mode, const LpxConfig& config);

// Argmax of relevance; ties prefer the smaller, then lexicographically
// smaller explanation. Throws ExplanationFailure on an empty candidate list.
const Explanation& best_explanation(const Triple& prediction,
                                    std::span<const Explanation> candidates,
                                    std::span<const double> relevances);

struct ExplanationResult {
  Triple prediction;
  Explanation explanation;          // empty when the search failed
  std::optional<double> relevance;  // absent for the random baselines
  std::string failure;

  bool failed() const { return explanation.empty(); }
};

// Explains every prediction with a built-in method. Per-prediction failures
// are reported in the result instead of thrown. `threads` > 1 explains
// predictions concurrently; the output is identical either way.
std::vector<ExplanationResult> explain(std::span<const Triple> predictions,
                                       const KnowledgeGraph& kg, const KgeModel& model,
                                       const LpxConfig& config, int threads = 1);

}  // namespace kgxb

#endif  // KGXBENCH_CORE_LPX_HPP_
