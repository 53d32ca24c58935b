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

// Task bodies and the end-to-end experiment runner.

#ifndef KGXBENCH_WORKFLOW_PIPELINE_HPP_
#define KGXBENCH_WORKFLOW_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/fsv.hpp"
#include "core/kg.hpp"
#include "core/kge.hpp"
#include "core/lpx.hpp"
#include "workflow/dag.hpp"
#include "workflow/executor.hpp"
#include "workflow/setup.hpp"

namespace kgxb {

struct EngineOptions {
  std::filesystem::path workdir = ".";
  std::filesystem::path data_dir = "data";
  int max_parallel = 1;
  std::optional<std::uint64_t> seed_override;
  int tune_budget = 4;
  std::optional<int> epochs;
  double select_threshold = 1.0;
  int select_max = 100;
  double beta = 1.0;

  // Verifier resolved through the registry, e.g. "mock" with
  // {"script": "answers.jsonl"} or "remote" with {"url": ...}.
  std::string verifier = "mock";
  nlohmann::json verifier_options = nlohmann::json::object();
  // In-process verifier used instead of the registry; `verifier_identity`
  // must then name it so cached scores are not mixed across verifiers.
  std::shared_ptr<Verifier> verifier_instance;
  std::string verifier_identity;

  int explain_threads = 1;
  int verifier_in_flight = 1;
  RetryPolicy retry;

  // Only build this output and its prerequisites.
  std::optional<std::string> target;

  std::function<void(const std::string&)> log;
};

struct RowResult {
  SetupRow row;
  std::string metrics_name;
  TaskStatus status = TaskStatus::kSkippedFailed;
  std::optional<nlohmann::json> metrics;
};

struct RunResult {
  RunReport report;
  std::vector<RowResult> rows;
  nlohmann::json metrics = nlohmann::json::object();  // what metrics.json holds
  int exit_code = 0;                                  // 0 ok, 1 task failure
};

DagOptions dag_options(const EngineOptions& options);

// Identity string of the configured verifier (kind, options, script hash).
std::string verifier_identity(const EngineOptions& options);

Dag build_dag(const std::vector<SetupRow>& rows, Mode mode, const EngineOptions& options);

// Dispatches on the task kind.
TaskBody make_task_body(const EngineOptions& options);

// Runs the experiment and writes run_report.jsonl and (without a target)
// metrics.json into the working directory.
RunResult run_experiment(const std::vector<SetupRow>& rows, Mode mode,
                         const EngineOptions& options);

// Fixed-width per-row table for terminals.
std::string format_summary(const RunResult& result, Mode mode);

// Artifact readers.
struct ScoreRecord {
  std::string subject, predicate, object;
  std::string lp_answer;
  int fsv = 0;
  std::optional<int> label;  // gold quality in validation runs
};
std::vector<ScoreRecord> read_scores(const std::filesystem::path& path);
HyperParams read_hp_config(const std::filesystem::path& path);

}  // namespace kgxb

#endif  // KGXBENCH_WORKFLOW_PIPELINE_HPP_
