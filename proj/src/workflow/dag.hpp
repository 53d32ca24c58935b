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

// Task graph for an experiment setup. Each setup row expands to the chain
// TUNE -> TRAIN -> RANK -> SELECT -> EXPLAIN -> EVALUATE -> METRICS; tasks
// with the same kind and parameters are stored once.

#ifndef KGXBENCH_WORKFLOW_DAG_HPP_
#define KGXBENCH_WORKFLOW_DAG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "workflow/setup.hpp"

namespace kgxb {

enum class TaskKind { kTune, kTrain, kRank, kSelect, kExplain, kEvaluate, kMetrics };

std::string_view task_kind_name(TaskKind kind);  // "TUNE", "TRAIN", ...

struct TaskSpec {
  TaskKind kind = TaskKind::kTune;
  nlohmann::json params = nlohmann::json::object();  // keys are kept sorted
  std::string output_name;
  std::vector<std::string> prerequisites;  // ids of prerequisite tasks
  // Artifacts of non-adjacent ancestors the body reads (e.g. the model).
  std::vector<std::string> reads;
  // Files outside the store the body reads.
  std::vector<std::filesystem::path> input_files;

  // kind + canonical parameters.
  std::string id() const;
};

class Dag {
 public:
  // Inserts `spec` unless a task with the same id exists; returns the id.
  // Every required id must already be present. Throws ValidationError when
  // two distinct tasks claim one output name.
  std::string add(TaskSpec spec);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<TaskSpec>& nodes() const { return nodes_; }
  const TaskSpec& node(std::size_t i) const { return nodes_.at(i); }
  std::optional<std::size_t> find(const std::string& id) const;
  std::optional<std::size_t> find_output(const std::string& output_name) const;

  // (prerequisite, dependent) index pairs.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;
  std::vector<std::vector<std::size_t>> dependents() const;
  std::vector<std::size_t> prerequisites_of(std::size_t i) const;

  // Kahn order, ties by insertion order. Throws ValidationError on a cycle.
  std::vector<std::size_t> topological_order() const;

  // The sub-DAG of `target` and its ancestors, insertion order preserved.
  Dag restricted_to(const std::string& output_name) const;

 private:
  std::vector<TaskSpec> nodes_;
  std::map<std::string, std::size_t> by_id_;
  std::map<std::string, std::size_t> by_output_;
};

struct DagOptions {
  std::filesystem::path data_dir = "data";
  int tune_budget = 4;
  std::optional<int> epochs;                  // replaces the epoch count tuning uses
  std::optional<std::uint64_t> seed_override;  // replaces every configured seed
  std::uint64_t tune_seed = 0;
  double select_threshold = 1.0;
  int select_max = 100;
  double beta = 1.0;
  // Identifies the verifier backend; part of EVALUATE identity.
  std::string verifier_identity = "mock";
};

struct RowOutputs {
  std::string explanations;
  std::string scores;
  std::string metrics;
};

// Output names of the row's explain/evaluate/metrics tasks.
RowOutputs row_outputs(const SetupRow& row, Mode mode, const DagOptions& options = {});

// Applies options.seed_override (if any) to the row's configs.
SetupRow effective_row(const SetupRow& row, const DagOptions& options);

Dag instantiate_dag(const std::vector<SetupRow>& rows, Mode mode,
                    const DagOptions& options = {});

}  // namespace kgxb

#endif  // KGXBENCH_WORKFLOW_DAG_HPP_
