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

#include "core/lpx.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "core/error.hpp"
#include "core/random.hpp"

namespace kgxb {

namespace {

LpxMethod builtin_method(const LpxConfig& config) {
  auto m = parse_lpx_method(config.method);
  if (!m) throw ConfigError("'" + config.method + "' is not a built-in explanation method");
  return *m;
}

std::uint64_t triple_salt(const Triple& t) {
  return (std::uint64_t{t.subject.value} << 40) ^ (std::uint64_t{t.predicate.value} << 20) ^
         t.object.value;
}

EntityId far_endpoint(const Triple& t, EntityId focus) {
  return t.subject == focus ? t.object : t.subject;
}

int degree_bucket(std::size_t degree) {
  if (degree <= 1) return 0;
  if (degree <= 4) return 1;
  return 2;
}

// Visits index combinations of size 1..k over n items, size-major and
// lexicographic within a size.
template <class Fn>
void for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
  std::vector<std::size_t> idx;
  for (std::size_t size = 1; size <= std::min(k, n); ++size) {
    idx.resize(size);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      fn(std::span<const std::size_t>(idx));
      std::size_t i = size;
      while (i > 0 && idx[i - 1] == n - size + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
}

Triple substitute(const Triple& t, EntityId from, EntityId to) {
  Triple out = t;
  if (out.subject == from) out.subject = to;
  if (out.object == from) out.object = to;
  return out;
}

double necessary_relevance(const KgeModel& model, const KnowledgeGraph& kg,
                           const Triple& prediction, const Explanation& candidate,
                           const LpxConfig& config, double original_rank) {
  for (const Triple& t : candidate.triples) {
    if (!t.involves(prediction.subject)) {
      throw ArgumentError("candidate triple " + kg.describe(t) +
                          " does not feature the prediction subject");
    }
  }
  const KgeModel post = post_train(model, kg, prediction.subject, candidate.triples, {},
                                   config.post_train);
  return rank(post, kg, prediction).rank - original_rank;
}

double sufficient_relevance(const KgeModel& model, const KnowledgeGraph& kg,
                            const Triple& prediction, const Explanation& candidate,
                            const LpxConfig& config, std::span<const EntityId> comparison) {
  if (comparison.empty()) {
    throw ConfigError("sufficient relevance needs a non-empty comparison set for " +
                      kg.describe(prediction));
  }
  double total = 0.0;
  for (EntityId c : comparison) {
    std::vector<Triple> added;
    added.reserve(candidate.size());
    for (const Triple& t : candidate.triples) {
      added.push_back(substitute(t, prediction.subject, c));
    }
    const Triple target{c, prediction.predicate, prediction.object};
    const KgeModel post = post_train(model, kg, c, {}, added, config.post_train);
    total += rank(model, kg, target).rank - rank(post, kg, target).rank;
  }
  return total / static_cast<double>(comparison.size());
}

ExplanationResult explain_one(const Triple& prediction, const KnowledgeGraph& kg,
                              const KgeModel& model, const LpxConfig& config,
                              LpxMethod method) {
  ExplanationResult result;
  result.prediction = prediction;
  try {
    switch (method) {
      case LpxMethod::kRandomSubject:
      case LpxMethod::kRandomPredicate:
      case LpxMethod::kRandomObject: {
        CandidateSet set = baseline_candidates(kg, prediction, config);
        if (set.candidates.empty()) throw ExplanationFailure("no candidate triples");
        result.explanation = std::move(set.candidates.front());
        return result;
      }
      case LpxMethod::kSingleTriple:
      case LpxMethod::kNeighborhood:
        break;
    }
    const CandidateSet set = kelpie_candidates(kg, prediction, config);
    if (set.candidates.empty()) throw ExplanationFailure("no candidate triples");
    std::vector<EntityId> comparison;
    double original_rank = 0.0;
    if (config.mode == RelevanceMode::kSufficient) {
      comparison = comparison_set(model, kg, prediction,
                                  static_cast<std::size_t>(config.comparison_limit));
    } else {
      original_rank = rank(model, kg, prediction).rank;
    }
    std::vector<double> relevances;
    relevances.reserve(set.candidates.size());
    for (const Explanation& x : set.candidates) {
      relevances.push_back(
          config.mode == RelevanceMode::kNecessary
              ? necessary_relevance(model, kg, prediction, x, config, original_rank)
              : sufficient_relevance(model, kg, prediction, x, config, comparison));
    }
    const Explanation& best = best_explanation(prediction, set.candidates, relevances);
    const auto pos = static_cast<std::size_t>(&best - set.candidates.data());
    result.explanation = best;
    result.relevance = relevances[pos];
  } catch (const Error& e) {
    result.explanation = {};
    result.relevance.reset();
    result.failure = e.what();
  }
  return result;
}

}  // namespace

std::string_view lpx_method_name(LpxMethod method) {
  switch (method) {
    case LpxMethod::kRandomSubject:
      return "random_subject";
    case LpxMethod::kRandomPredicate:
      return "random_predicate";
    case LpxMethod::kRandomObject:
      return "random_object";
    case LpxMethod::kSingleTriple:
      return "single_triple";
    case LpxMethod::kNeighborhood:
      return "neighborhood";
  }
  return "?";
}

std::optional<LpxMethod> parse_lpx_method(std::string_view name) {
  for (LpxMethod m : {LpxMethod::kRandomSubject, LpxMethod::kRandomPredicate,
                      LpxMethod::kRandomObject, LpxMethod::kSingleTriple,
                      LpxMethod::kNeighborhood}) {
    if (name == lpx_method_name(m)) return m;
  }
  return std::nullopt;
}

std::string_view relevance_mode_name(RelevanceMode mode) {
  return mode == RelevanceMode::kNecessary ? "necessary" : "sufficient";
}

void LpxConfig::validate() const {
  if (k < 1) throw ConfigError("lpx k must be >= 1");
  if (prefilter_size < k) throw ConfigError("lpx prefilter_size must be >= k");
  if (comparison_limit < 1) throw ConfigError("lpx comparison_limit must be >= 1");
  if (post_train.epochs < 0) throw ConfigError("post-training epochs must be >= 0");
  if (!(post_train.learning_rate > 0.0)) {
    throw ConfigError("post-training learning rate must be positive");
  }
}

int LpxConfig::effective_k() const {
  return parse_lpx_method(method) == LpxMethod::kSingleTriple ? 1 : k;
}

Explanation Explanation::of(std::vector<Triple> triples) {
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  return Explanation{std::move(triples)};
}

CandidateSet baseline_candidates(const KnowledgeGraph& kg, const Triple& prediction,
                                 const LpxConfig& config) {
  config.validate();
  const LpxMethod method = builtin_method(config);
  std::vector<Triple> pool;
  switch (method) {
    case LpxMethod::kRandomSubject:
      pool = kg.incident_train(prediction.subject);
      break;
    case LpxMethod::kRandomObject:
      pool = kg.incident_train(prediction.object);
      break;
    case LpxMethod::kRandomPredicate:
      for (const Triple& t : kg.train()) {
        if (t.predicate == prediction.predicate) pool.push_back(t);
      }
      break;
    default:
      throw ArgumentError("baseline_candidates needs a random_* method");
  }
  CandidateSet set{prediction, {}};
  if (pool.empty()) return set;
  Rng rng(derive_seed(config.seed, {static_cast<std::uint64_t>(method),
                                    triple_salt(prediction)}));
  const std::size_t take = std::min(pool.size(), static_cast<std::size_t>(config.k));
  // Partial Fisher-Yates: the first `take` slots become the sample.
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  set.candidates.push_back(Explanation::of(std::move(pool)));
  return set;
}

std::size_t path_fit_score(const KnowledgeGraph& kg, EntityId from, EntityId to) {
  std::unordered_map<std::uint32_t, std::size_t> to_neighbors;
  for (const Triple& t : kg.incident_train(to)) {
    ++to_neighbors[far_endpoint(t, to).value];
  }
  auto edges_to_target = [&](EntityId x) -> std::size_t {
    auto it = to_neighbors.find(x.value);
    return it == to_neighbors.end() ? 0 : it->second;
  };
  std::size_t walks = from == to ? 1 : 0;
  walks += edges_to_target(from);
  for (const Triple& t : kg.incident_train(from)) {
    walks += edges_to_target(far_endpoint(t, from));
  }
  return walks;
}

std::vector<Triple> summarize(const KnowledgeGraph& kg, EntityId focus,
                              std::span<const Triple> subgraph) {
  // key: (predicate, outgoing, bucket) -> smallest triple
  std::map<std::tuple<std::uint32_t, bool, int>, Triple> representatives;
  for (const Triple& t : subgraph) {
    if (!t.involves(focus)) {
      throw ArgumentError("summarize: triple " + kg.describe(t) +
                          " does not feature the focus entity");
    }
    const bool outgoing = t.subject == focus;
    const int bucket = degree_bucket(kg.train_degree(far_endpoint(t, focus)));
    const auto key = std::make_tuple(t.predicate.value, outgoing, bucket);
    auto [it, inserted] = representatives.try_emplace(key, t);
    if (!inserted && t < it->second) it->second = t;
  }
  std::vector<Triple> out;
  out.reserve(representatives.size());
  for (const auto& [key, t] : representatives) out.push_back(t);
  std::sort(out.begin(), out.end());
  return out;
}

CandidateSet kelpie_candidates(const KnowledgeGraph& kg, const Triple& prediction,
                               const LpxConfig& config) {
  config.validate();
  const LpxMethod method = builtin_method(config);
  if (method != LpxMethod::kNeighborhood && method != LpxMethod::kSingleTriple) {
    throw ArgumentError("kelpie_candidates needs the neighborhood or single_triple method");
  }
  std::vector<Triple> neighborhood = kg.incident_train(prediction.subject);
  if (config.summarize) {
    neighborhood = summarize(kg, prediction.subject, neighborhood);
  }

  struct Scored {
    std::size_t fit;
    Triple triple;
  };
  std::vector<Scored> scored;
  scored.reserve(neighborhood.size());
  for (const Triple& t : neighborhood) {
    scored.push_back(
        {path_fit_score(kg, far_endpoint(t, prediction.subject), prediction.object), t});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.fit != b.fit) return a.fit > b.fit;
    return a.triple < b.triple;
  });
  if (scored.size() > static_cast<std::size_t>(config.prefilter_size)) {
    scored.resize(static_cast<std::size_t>(config.prefilter_size));
  }
  std::vector<Triple> filtered;
  filtered.reserve(scored.size());
  for (const Scored& s : scored) filtered.push_back(s.triple);
  std::sort(filtered.begin(), filtered.end());

  CandidateSet set{prediction, {}};
  for_each_combination(filtered.size(), static_cast<std::size_t>(config.effective_k()),
                       [&](std::span<const std::size_t> idx) {
                         Explanation x;
                         x.triples.reserve(idx.size());
                         for (std::size_t i : idx) x.triples.push_back(filtered[i]);
                         set.candidates.push_back(std::move(x));
                       });
  return set;
}

std::vector<EntityId> comparison_set(const KgeModel& model, const KnowledgeGraph& kg,
                                     const Triple& prediction, std::size_t limit) {
  if (limit < 1) throw ArgumentError("comparison_set: limit must be >= 1");
  std::vector<EntityId> out;
  for (std::uint32_t c = 0; c < kg.num_entities() && out.size() < limit; ++c) {
    const EntityId id{c};
    if (lp(model, kg, Query{id, prediction.predicate}) != prediction.object) {
      out.push_back(id);
    }
  }
  return out;
}

double relevance(const KgeModel& model, const KnowledgeGraph& kg, const Triple& prediction,
                 const Explanation& candidate, RelevanceMode mode, const LpxConfig& config) {
  if (mode == RelevanceMode::kNecessary) {
    return necessary_relevance(model, kg, prediction, candidate, config,
                               rank(model, kg, prediction).rank);
  }
  const auto comparison = comparison_set(model, kg, prediction,
                                         static_cast<std::size_t>(config.comparison_limit));
  return sufficient_relevance(model, kg, prediction, candidate, config, comparison);
}

const Explanation& best_explanation(const Triple& prediction,
                                    std::span<const Explanation> candidates,
                                    std::span<const double> relevances) {
  (void)prediction;
  if (candidates.empty()) throw ExplanationFailure("no candidate explanations");
  if (candidates.size() != relevances.size()) {
    throw ArgumentError("best_explanation: relevances are not aligned with candidates");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (relevances[i] > relevances[best]) {
      best = i;
    } else if (relevances[i] == relevances[best]) {
      const Explanation& a = candidates[i];
      const Explanation& b = candidates[best];
      if (a.size() < b.size() || (a.size() == b.size() && a.triples < b.triples)) best = i;
    }
  }
  return candidates[best];
}

std::vector<ExplanationResult> explain(std::span<const Triple> predictions,
                                       const KnowledgeGraph& kg, const KgeModel& model,
                                       const LpxConfig& config, int threads) {
  config.validate();
  const LpxMethod method = builtin_method(config);
  std::vector<ExplanationResult> results(predictions.size());
  const std::size_t workers =
      std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(predictions.size(), 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      results[i] = explain_one(predictions[i], kg, model, config, method);
    }
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < predictions.size(); i = next++) {
        results[i] = explain_one(predictions[i], kg, model, config, method);
      }
    });
  }
  pool.clear();
  return results;
}

}  // namespace kgxb
