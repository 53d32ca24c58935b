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

#include "core/fsv.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <iostream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "core/error.hpp"
#include "core/random.hpp"

namespace kgxb {

namespace {

constexpr std::string_view kInstructionSection =
    "You are a helpful, respectful and honest assistant.\n"
    "Your response should be crisp, short and not repetitive.\n"
    "Discard any preamble, explanation, greeting, or final consideration.";

constexpr std::string_view kFormatSection =
    "A triple is a statement <subject, predicate, object>.\n"
    "The subject and the object are entities, and the predicate is a relation from the "
    "subject to the object.\n"
    "Perform a Link Prediction task, given a query as an incomplete triple <subject, "
    "predicate, ?>, predict the missing object that completes the triple making it a true "
    "statement.\n"
    "Strict requirement: output solely the name of a single object entity, discard any "
    "explanation or other text.\n"
    "Correct format: Elizabeth_of_Bohemia\n"
    "Incorrect format: The object entity is Elizabeth_of_Bohemia.";

constexpr std::string_view kConstraintPrefix = "Pick the answer from: ";

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string query_line(const KnowledgeGraph& kg, Query q) {
  return "(" + kg.entity_label(q.subject) + ", " + kg.relation_label(q.predicate) + ", ?)";
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

// Shared filtering with lp(): known train/validation objects are skipped
// unless that would leave nothing.
std::vector<std::uint32_t> ranked_pool(const KgeModel& model, const KnowledgeGraph& kg,
                                       Query q, std::vector<std::uint32_t>* excluded) {
  std::vector<double> scores(kg.num_entities());
  score_objects(model, q, scores);
  const auto known = kg.train_valid_objects(q);
  const bool filter = known.size() < scores.size();
  std::vector<std::uint32_t> pool;
  for (std::uint32_t e = 0; e < scores.size(); ++e) {
    const bool skip = filter && std::binary_search(known.begin(), known.end(), EntityId{e});
    if (skip) {
      if (excluded != nullptr) excluded->push_back(e);
    } else {
      pool.push_back(e);
    }
  }
  auto by_score = [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::sort(pool.begin(), pool.end(), by_score);
  if (excluded != nullptr) std::sort(excluded->begin(), excluded->end(), by_score);
  return pool;
}

std::uint64_t query_salt(Query q) {
  return (std::uint64_t{q.subject.value} << 32) | q.predicate.value;
}

}  // namespace

std::string_view prompting_name(Prompting p) {
  return p == Prompting::kZeroShot ? "zero_shot" : "few_shot";
}

void EvalConfig::validate() const {
  if (n_examples < 1) throw ConfigError("n_examples must be >= 1");
  if (constraint_size < 1) throw ConfigError("constraint size must be >= 1");
  if (constrained && constraint_size < 2) {
    throw ConfigError("constraint size must be >= 2 when constrained");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

std::string verbalize(const KnowledgeGraph& kg, const Explanation& explanation) {
  std::string out;
  for (const Triple& t : explanation.triples) {
    if (!out.empty()) out += '\n';
    out += "(" + kg.entity_label(t.subject) + ", " + kg.relation_label(t.predicate) + ", " +
           kg.entity_label(t.object) + ")";
  }
  return out;
}

std::vector<Triple> select_fewshot(const KnowledgeGraph& kg, Query query, int n,
                                   std::uint64_t seed) {
  std::vector<Triple> same;
  std::vector<Triple> other;
  for (const Triple& t : kg.train()) {
    if (t.subject == query.subject && t.predicate == query.predicate) continue;
    (t.predicate == query.predicate ? same : other).push_back(t);
  }
  Rng rng(derive_seed(seed, {0xfe5, query_salt(query)}));
  auto sample = [&](std::vector<Triple>& pool, std::size_t take, std::vector<Triple>& out) {
    take = std::min(take, pool.size());
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + rng.uniform_index(pool.size() - i);
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
  };
  std::vector<Triple> out;
  const auto want = static_cast<std::size_t>(std::max(n, 0));
  sample(same, want, out);
  if (out.size() < want) sample(other, want - out.size(), out);
  return out;
}

std::vector<EntityId> constraint_entities(const KgeModel& model, const KnowledgeGraph& kg,
                                          Query query, int m, std::uint64_t seed) {
  std::vector<std::uint32_t> excluded;
  std::vector<std::uint32_t> pool = ranked_pool(model, kg, query, &excluded);
  const auto want = static_cast<std::size_t>(std::max(m, 0));
  if (pool.size() > want) pool.resize(want);
  for (std::size_t i = 0; pool.size() < want && i < excluded.size(); ++i) {
    pool.push_back(excluded[i]);
  }
  Rng rng(derive_seed(seed, {0xc0de, query_salt(query)}));
  rng.shuffle(std::span<std::uint32_t>(pool));
  std::vector<EntityId> out;
  out.reserve(pool.size());
  for (std::uint32_t e : pool) out.push_back(EntityId{e});
  return out;
}

Prompt build_prompt(const KnowledgeGraph& kg, const KgeModel& model, Query query,
                    std::string_view explanation_text, const EvalConfig& config) {
  config.validate();
  std::vector<std::string> sections;
  sections.emplace_back(kInstructionSection);
  sections.emplace_back(kFormatSection);
  if (config.prompting == Prompting::kFewShot) {
    std::string block;
    for (const Triple& t : select_fewshot(kg, query, config.n_examples, config.seed)) {
      if (!block.empty()) block += '\n';
      block += query_line(kg, Query{t.subject, t.predicate}) + " -> " +
               kg.entity_label(t.object);
    }
    if (!block.empty()) sections.push_back(std::move(block));
  }
  std::string query_section = query_line(kg, query);
  if (!explanation_text.empty()) {
    query_section += '\n';
    query_section += explanation_text;
  }
  sections.push_back(std::move(query_section));
  if (config.constrained) {
    std::string block(kConstraintPrefix);
    const auto entities =
        constraint_entities(model, kg, query, config.constraint_size, config.seed);
    for (std::size_t i = 0; i < entities.size(); ++i) {
      if (i > 0) block += ", ";
      block += kg.entity_label(entities[i]);
    }
    sections.push_back(std::move(block));
  }

  Prompt prompt;
  prompt.query = query;
  prompt.with_explanation = !explanation_text.empty();
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (i > 0) prompt.text += "\n\n";
    prompt.text += sections[i];
  }
  return prompt;
}

std::optional<PromptView> parse_prompt(std::string_view text) {
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    // The query section always starts right after a blank line.
    if (i == 0 || !lines[i - 1].empty()) continue;
    if (line.size() < 7 || line.front() != '(' || !line.ends_with(", ?)")) continue;
    PromptView view;
    view.query_line = line;
    for (std::size_t j = i + 1; j < lines.size() && !lines[j].empty(); ++j) {
      if (!view.explanation_text.empty()) view.explanation_text += '\n';
      view.explanation_text += lines[j];
    }
    return view;
  }
  return std::nullopt;
}

std::string normalize_answer(std::string_view raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (true) {
    const std::size_t b = begin, e = end;
    while (begin < end && is_space(raw[begin])) ++begin;
    while (end > begin && is_space(raw[end - 1])) --end;
    while (begin < end && is_punct(raw[begin])) ++begin;
    while (end > begin && is_punct(raw[end - 1])) --end;
    if (b == begin && e == end) break;
  }
  std::string out;
  bool in_space = false;
  for (std::size_t i = begin; i < end; ++i) {
    const char c = raw[i];
    if (is_space(c)) {
      in_space = true;
      continue;
    }
    if (in_space) out += '_';
    in_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

AnswerMatcher::AnswerMatcher(const KnowledgeGraph& kg) {
  for (std::uint32_t e = 0; e < kg.num_entities(); ++e) {
    // First insertion wins, so collisions resolve to the smallest id.
    index_.try_emplace(normalize_answer(kg.entity_label(EntityId{e})), EntityId{e});
  }
}

std::optional<EntityId> AnswerMatcher::match(std::string_view raw) const {
  const std::string key = normalize_answer(raw);
  if (key.empty()) return std::nullopt;
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EntityId> match_answer(const KnowledgeGraph& kg, std::string_view raw_answer) {
  return AnswerMatcher(kg).match(raw_answer);
}

int indicator(EntityId lp_answer, std::optional<EntityId> matched) {
  return matched.has_value() && *matched == lp_answer ? 1 : 0;
}

int fsv_of(int i_without, int i_with) {
  auto check = [](int v) {
    if (v != 0 && v != 1) throw ArgumentError("indicator values must be 0 or 1");
  };
  check(i_without);
  check(i_with);
  return i_with - i_without;
}

std::vector<EvaluationRecord> evaluate(std::span<const Triple> predictions,
                                       std::span<const Explanation> explanations,
                                       const KnowledgeGraph& kg, const KgeModel& model,
                                       Verifier& verifier, const EvalConfig& config,
                                       const EvaluateOptions& options) {
  config.validate();
  if (predictions.size() != explanations.size()) {
    throw ArgumentError("evaluate: predictions and explanations differ in length");
  }
  const Verbalizer verbalizer = options.verbalizer ? options.verbalizer : Verbalizer(verbalize);
  const auto log = options.log ? options.log
                               : std::function<void(const std::string&)>(
                                     [](const std::string& m) { std::cerr << m << '\n'; });

  const std::size_t n = predictions.size();
  std::vector<EvaluationRecord> records(n);
  // prompts[2i] is item i without its explanation, prompts[2i + 1] with it.
  std::vector<std::string> prompts(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Query q{predictions[i].subject, predictions[i].predicate};
    records[i].prediction = predictions[i];
    records[i].lp_answer = lp(model, kg, q);
    prompts[2 * i] = build_prompt(kg, model, q, "", config).text;
    prompts[2 * i + 1] = build_prompt(kg, model, q, verbalizer(kg, explanations[i]), config).text;
  }

  std::vector<std::string> answers(2 * n);
  std::vector<char> failed(2 * n, 0);
  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  const std::size_t num_batches = (2 * n + batch - 1) / batch;
  std::mutex log_mu;

  auto run_batch = [&](std::size_t b) {
    const std::size_t start = b * batch;
    const std::size_t end = std::min(2 * n, start + batch);
    const std::span<const std::string> chunk(prompts.data() + start, end - start);
    auto backoff = options.retry.initial_backoff;
    std::string last_error;
    for (int attempt = 1; attempt <= std::max(options.retry.attempts, 1); ++attempt) {
      try {
        auto out = verifier.simulate(chunk);
        if (out.size() != chunk.size()) {
          throw TransportError("verifier returned " + std::to_string(out.size()) +
                               " answers for " + std::to_string(chunk.size()) + " prompts");
        }
        for (std::size_t i = 0; i < out.size(); ++i) answers[start + i] = std::move(out[i]);
        return;
      } catch (const TransportError& e) {
        last_error = e.what();
        if (attempt < options.retry.attempts && backoff.count() > 0) {
          std::this_thread::sleep_for(backoff);
          backoff = std::chrono::milliseconds(
              static_cast<long long>(static_cast<double>(backoff.count()) *
                                     options.retry.multiplier));
        }
      }
    }
    for (std::size_t i = start; i < end; ++i) failed[i] = 1;
    std::lock_guard<std::mutex> lock(log_mu);
    log("verifier batch " + std::to_string(b) + " failed after " +
        std::to_string(options.retry.attempts) + " attempts: " + last_error);
  };

  const std::size_t workers =
      std::min<std::size_t>(std::max(options.max_in_flight, 1), std::max<std::size_t>(num_batches, 1));
  if (workers <= 1) {
    for (std::size_t b = 0; b < num_batches; ++b) run_batch(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < num_batches; b = next++) run_batch(b);
      });
    }
  }

  const AnswerMatcher matcher(kg);
  for (std::size_t i = 0; i < n; ++i) {
    EvaluationRecord& r = records[i];
    r.raw_without = answers[2 * i];
    r.raw_with = answers[2 * i + 1];
    r.failed_without = failed[2 * i] != 0;
    r.failed_with = failed[2 * i + 1] != 0;
    r.correct_without = r.failed_without ? 0 : indicator(r.lp_answer, matcher.match(r.raw_without));
    r.correct_with = r.failed_with ? 0 : indicator(r.lp_answer, matcher.match(r.raw_with));
    r.fsv = fsv_of(r.correct_without, r.correct_with);
  }
  return records;
}

FsvVector fsv_vector(std::span<const EvaluationRecord> records) {
  std::vector<int> values;
  values.reserve(records.size());
  for (const auto& r : records) values.push_back(r.fsv);
  return FsvVector(std::move(values));
}

}  // namespace kgxb
