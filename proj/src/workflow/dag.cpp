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

#include "workflow/dag.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "core/error.hpp"

namespace kgxb {
namespace {

nlohmann::json data_files(const DagOptions& options, const std::string& kg) {
  const auto dir = options.data_dir / kg;
  return {{"train", (dir / "train.txt").string()},
          {"valid", (dir / "valid.txt").string()},
          {"test", (dir / "test.txt").string()}};
}

std::vector<std::filesystem::path> kg_files(const nlohmann::json& files) {
  return {files["train"].get<std::string>(), files["valid"].get<std::string>(),
          files["test"].get<std::string>()};
}

std::string pair_name(const SetupRow& row) { return row.kg_name + "_" + row.kge_name; }

std::string lpx_name(const SetupRow& row) {
  return row.lpx_config ? render_config(*row.lpx_config) : "ground_truth";
}

}  // namespace

std::string_view task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kTune: return "TUNE";
    case TaskKind::kTrain: return "TRAIN";
    case TaskKind::kRank: return "RANK";
    case TaskKind::kSelect: return "SELECT";
    case TaskKind::kExplain: return "EXPLAIN";
    case TaskKind::kEvaluate: return "EVALUATE";
    case TaskKind::kMetrics: return "METRICS";
  }
  return "?";
}

std::string TaskSpec::id() const {
  return std::string(task_kind_name(kind)) + ":" + params.dump();
}

std::string Dag::add(TaskSpec spec) {
  std::string id = spec.id();
  if (by_id_.contains(id)) return id;
  for (const auto& r : spec.prerequisites) {
    if (!by_id_.contains(r)) throw ValidationError("task " + id + " requires unknown " + r);
  }
  if (by_output_.contains(spec.output_name)) {
    throw ValidationError("two distinct tasks produce " + spec.output_name);
  }
  by_id_.emplace(id, nodes_.size());
  by_output_.emplace(spec.output_name, nodes_.size());
  nodes_.push_back(std::move(spec));
  return id;
}

std::optional<std::size_t> Dag::find(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Dag::find_output(const std::string& output_name) const {
  auto it = by_output_.find(output_name);
  if (it == by_output_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> Dag::prerequisites_of(std::size_t i) const {
  std::vector<std::size_t> out;
  for (const auto& r : nodes_.at(i).prerequisites) out.push_back(by_id_.at(r));
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> Dag::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t p : prerequisites_of(i)) out.emplace_back(p, i);
  }
  return out;
}

std::vector<std::vector<std::size_t>> Dag::dependents() const {
  std::vector<std::vector<std::size_t>> out(nodes_.size());
  for (const auto& [from, to] : edges()) out[from].push_back(to);
  return out;
}

std::vector<std::size_t> Dag::topological_order() const {
  std::vector<std::size_t> indegree(nodes_.size(), 0);
  const auto deps = dependents();
  for (const auto& [from, to] : edges()) ++indegree[to];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const std::size_t i = ready.top();
    ready.pop();
    order.push_back(i);
    for (std::size_t d : deps[i]) {
      if (--indegree[d] == 0) ready.push(d);
    }
  }
  if (order.size() != nodes_.size()) throw ValidationError("task graph has a cycle");
  return order;
}

Dag Dag::restricted_to(const std::string& output_name) const {
  const auto target = find_output(output_name);
  if (!target) throw ArgumentError("no task produces '" + output_name + "'");
  std::set<std::size_t> keep;
  std::vector<std::size_t> stack{*target};
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    if (!keep.insert(i).second) continue;
    for (std::size_t p : prerequisites_of(i)) stack.push_back(p);
  }
  Dag out;
  for (std::size_t i : keep) out.add(nodes_[i]);
  return out;
}

SetupRow effective_row(const SetupRow& row, const DagOptions& options) {
  SetupRow out = row;
  if (options.seed_override) {
    if (out.lpx_config) out.lpx_config->seed = *options.seed_override;
    out.eval_config.seed = *options.seed_override;
  }
  return out;
}

RowOutputs row_outputs(const SetupRow& raw, Mode mode, const DagOptions& options) {
  const SetupRow row = effective_row(raw, options);
  (void)mode;
  RowOutputs out;
  out.explanations = "explanations." + pair_name(row) + "_" + lpx_name(row);
  out.scores = "scores." + pair_name(row) + "_" + lpx_name(row) + "_" +
               render_config(row.eval_config);
  out.metrics = "metrics." + pair_name(row) + "_" + lpx_name(row) + "_" +
                render_config(row.eval_config) + "_" + render_metric_names(row.metric_names);
  return out;
}

Dag instantiate_dag(const std::vector<SetupRow>& rows, Mode mode, const DagOptions& options) {
  if (rows.empty()) throw ArgumentError("setup has no rows");
  Dag dag;
  const std::uint64_t tune_seed = options.seed_override.value_or(options.tune_seed);
  for (const SetupRow& raw : rows) {
    const SetupRow row = effective_row(raw, options);
    if (mode == Mode::kValidation && row.lpx_config) {
      throw ArgumentError("validation rows carry no lpx_config");
    }
    if (mode == Mode::kComparison && !row.lpx_config) {
      throw ArgumentError("comparison rows need an lpx_config");
    }
    const nlohmann::json files = data_files(options, row.kg_name);
    const nlohmann::json base{{"kg", row.kg_name}, {"kge", row.kge_name}};
    const RowOutputs names = row_outputs(row, mode);

    TaskSpec tune{TaskKind::kTune, base, "hp_config." + pair_name(row), {}, {}, kg_files(files)};
    tune.params["files"] = files;
    tune.params["budget"] = options.tune_budget;
    tune.params["seed"] = tune_seed;
    if (options.epochs) tune.params["epochs"] = *options.epochs;
    const std::string tune_id = dag.add(tune);

    TaskSpec train{TaskKind::kTrain, base, "kge." + pair_name(row), {tune_id}, {},
                   kg_files(files)};
    train.params["files"] = files;
    if (options.epochs) train.params["epochs"] = *options.epochs;
    const std::string train_id = dag.add(train);

    TaskSpec rank{TaskKind::kRank, base, "ranked." + pair_name(row), {train_id}, {},
                  kg_files(files)};
    rank.params["files"] = files;
    const std::string rank_id = dag.add(rank);

    TaskSpec select{TaskKind::kSelect, base, "predictions." + pair_name(row), {rank_id}, {},
                    {}};
    select.params["threshold"] = options.select_threshold;
    select.params["max"] = options.select_max;
    const std::string select_id = dag.add(select);

    TaskSpec explain{TaskKind::kExplain, base, names.explanations, {select_id}, {},
                     kg_files(files)};
    explain.params["files"] = files;
    if (row.lpx_config) {
      explain.params["lpx"] = to_json(*row.lpx_config);
      explain.reads.push_back(train.output_name);
    } else {
      explain.params["lpx"] = "ground_truth";
      const auto gt = options.data_dir / row.kg_name / "ground_truth.jsonl";
      explain.params["ground_truth"] = gt.string();
      explain.input_files.push_back(gt);
    }
    const std::string explain_id = dag.add(explain);

    TaskSpec evaluate{TaskKind::kEvaluate, explain.params, names.scores, {explain_id},
                      {train.output_name}, kg_files(files)};
    evaluate.params.erase("ground_truth");
    evaluate.params["eval"] = to_json(row.eval_config);
    evaluate.params["verifier"] = options.verifier_identity;
    const std::string evaluate_id = dag.add(evaluate);

    TaskSpec metrics{TaskKind::kMetrics, base, names.metrics, {evaluate_id}, {}, {}};
    metrics.params["lpx"] = explain.params["lpx"];
    metrics.params["eval"] = evaluate.params["eval"];
    metrics.params["metric_names"] = row.metric_names;
    metrics.params["beta"] = options.beta;
    metrics.params["mode"] = mode_name(mode);
    dag.add(metrics);
  }
  return dag;
}

}  // namespace kgxb
