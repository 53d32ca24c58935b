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

// Parallel, cache-aware execution of a task graph.

#ifndef KGXBENCH_WORKFLOW_EXECUTOR_HPP_
#define KGXBENCH_WORKFLOW_EXECUTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "workflow/dag.hpp"
#include "workflow/store.hpp"

namespace kgxb {

// Bumped whenever an artifact layout changes; part of every cache key.
inline constexpr std::string_view kEngineFormatVersion = "kgxbench-artifacts/1";

enum class TaskStatus { kExecuted, kCacheHit, kSkippedFailed, kFailed };

std::string_view task_status_name(TaskStatus status);  // "executed", "cache-hit", ...

struct TaskRecord {
  std::string id;
  std::string output_name;
  TaskKind kind = TaskKind::kTune;
  TaskStatus status = TaskStatus::kSkippedFailed;
  std::int64_t start_ms = 0;  // wall clock, milliseconds since the epoch
  std::int64_t end_ms = 0;
  std::string cache_key;
  std::string error;
};

struct RunReport {
  std::vector<TaskRecord> records;  // DAG insertion order

  bool ok() const;
  std::size_t count(TaskStatus status) const;
  std::size_t count(TaskKind kind, TaskStatus status) const;
  const TaskRecord* find(std::string_view output_name) const;
  // One JSON object per line: task, kind, output, status, start/end times.
  std::string to_jsonl() const;
};

class TaskContext {
 public:
  TaskContext(const TaskSpec& spec, const ArtifactStore& store, std::filesystem::path output)
      : spec_(spec), store_(store), output_(std::move(output)) {}

  const TaskSpec& spec() const { return spec_; }
  // Path of a committed upstream artifact.
  std::filesystem::path input(const std::string& output_name) const {
    return store_.path_of(output_name);
  }
  // Where the body writes its artifact; committed by the executor on success.
  const std::filesystem::path& output() const { return output_; }

 private:
  const TaskSpec& spec_;
  const ArtifactStore& store_;
  std::filesystem::path output_;
};

using TaskBody = std::function<void(const TaskContext&)>;

// SHA-256 over the kind, canonical params, the content hashes of every
// prerequisite and read artifact and of every input file, the keys the
// prerequisites were committed under, and the engine format version.
// Throws IoError when an input cannot be hashed.
std::string cache_key(const Dag& dag, std::size_t task, const ArtifactStore& store);

struct ExecuteOptions {
  int max_parallel = 1;
  // Receives one line per finished task; may be empty.
  std::function<void(const TaskRecord&)> on_finish;
};

// Runs ready tasks on up to max_parallel threads. Tasks whose artifact is
// complete for their current cache key are not run. A failed task marks its
// transitive dependents skipped-failed; independent tasks still run.
RunReport execute(const Dag& dag, ArtifactStore& store, const TaskBody& body,
                  const ExecuteOptions& options = {});

}  // namespace kgxb

#endif  // KGXBENCH_WORKFLOW_EXECUTOR_HPP_
