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

#include "workflow/executor.hpp"

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "core/error.hpp"

namespace kgxb {
namespace {

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string_view task_status_name(TaskStatus status) {
  switch (status) {
    case TaskStatus::kExecuted: return "executed";
    case TaskStatus::kCacheHit: return "cache-hit";
    case TaskStatus::kSkippedFailed: return "skipped-failed";
    case TaskStatus::kFailed: return "failed";
  }
  return "?";
}

bool RunReport::ok() const {
  return count(TaskStatus::kFailed) == 0 && count(TaskStatus::kSkippedFailed) == 0;
}

std::size_t RunReport::count(TaskStatus status) const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.status == status;
  return n;
}

std::size_t RunReport::count(TaskKind kind, TaskStatus status) const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.kind == kind && r.status == status;
  return n;
}

const TaskRecord* RunReport::find(std::string_view output_name) const {
  for (const auto& r : records) {
    if (r.output_name == output_name) return &r;
  }
  return nullptr;
}

std::string RunReport::to_jsonl() const {
  std::string out;
  for (const auto& r : records) {
    nlohmann::json j{{"task", r.id},
                     {"kind", task_kind_name(r.kind)},
                     {"output", r.output_name},
                     {"status", task_status_name(r.status)},
                     {"start_ms", r.start_ms},
                     {"end_ms", r.end_ms},
                     {"cache_key", r.cache_key}};
    if (!r.error.empty()) j["error"] = r.error;
    out += j.dump() + "\n";
  }
  return out;
}

std::string cache_key(const Dag& dag, std::size_t task, const ArtifactStore& store) {
  const TaskSpec& spec = dag.node(task);
  nlohmann::json material{{"kind", task_kind_name(spec.kind)},
                          {"params", spec.params},
                          {"format", kEngineFormatVersion}};
  nlohmann::json artifacts = nlohmann::json::object();
  nlohmann::json upstream = nlohmann::json::object();
  for (std::size_t p : dag.prerequisites_of(task)) {
    const std::string& name = dag.node(p).output_name;
    artifacts[name] = store.content_hash(name);
    upstream[name] = store.meta(name)->cache_key;
  }
  for (const std::string& name : spec.reads) artifacts[name] = store.content_hash(name);
  nlohmann::json files = nlohmann::json::object();
  for (const auto& f : spec.input_files) {
    if (!std::filesystem::is_regular_file(f)) throw IoError("missing input file " + f.string());
    files[f.string()] = sha256_file(f);
  }
  material["artifacts"] = std::move(artifacts);
  material["files"] = std::move(files);
  material["upstream"] = std::move(upstream);
  return sha256_hex(material.dump());
}

RunReport execute(const Dag& dag, ArtifactStore& store, const TaskBody& body,
                  const ExecuteOptions& options) {
  if (options.max_parallel < 1) throw ArgumentError("max_parallel must be at least 1");
  const std::size_t n = dag.size();
  const auto dependents = dag.dependents();

  RunReport report;
  report.records.resize(n);
  std::vector<std::size_t> pending(n, 0);
  std::vector<bool> resolved(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    report.records[i].id = dag.node(i).id();
    report.records[i].output_name = dag.node(i).output_name;
    report.records[i].kind = dag.node(i).kind;
    pending[i] = dag.prerequisites_of(i).size();
  }

  std::mutex mu;
  std::condition_variable cv;
  std::set<std::size_t> ready;
  std::size_t finished = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (pending[i] == 0) ready.insert(i);
  }

  // Called with `mu` held.
  auto finish = [&](std::size_t i) {
    resolved[i] = true;
    ++finished;
    const TaskRecord& rec = report.records[i];
    if (options.on_finish) options.on_finish(rec);
    if (rec.status == TaskStatus::kExecuted || rec.status == TaskStatus::kCacheHit) {
      for (std::size_t d : dependents[i]) {
        if (--pending[d] == 0 && !resolved[d]) ready.insert(d);
      }
      return;
    }
    std::vector<std::size_t> stack(dependents[i].begin(), dependents[i].end());
    while (!stack.empty()) {
      const std::size_t d = stack.back();
      stack.pop_back();
      if (resolved[d]) continue;
      resolved[d] = true;
      ++finished;
      ready.erase(d);
      TaskRecord& skipped = report.records[d];
      skipped.status = TaskStatus::kSkippedFailed;
      skipped.error = "prerequisite " + rec.output_name + " did not complete";
      if (options.on_finish) options.on_finish(skipped);
      stack.insert(stack.end(), dependents[d].begin(), dependents[d].end());
    }
  };

  auto run_one = [&](std::size_t i) {
    TaskRecord rec = report.records[i];
    rec.start_ms = now_ms();
    const TaskSpec& spec = dag.node(i);
    std::filesystem::path temp;
    try {
      rec.cache_key = cache_key(dag, i, store);
      if (store.complete(spec.output_name, rec.cache_key)) {
        rec.status = TaskStatus::kCacheHit;
      } else {
        temp = store.temp_path(spec.output_name);
        body(TaskContext(spec, store, temp));
        if (!std::filesystem::exists(temp)) {
          throw Error(ErrorCode::kInternal, "task wrote no output");
        }
        store.commit(spec.output_name, temp, rec.cache_key);
        rec.status = TaskStatus::kExecuted;
      }
    } catch (const std::exception& e) {
      rec.status = TaskStatus::kFailed;
      rec.error = e.what();
      if (!temp.empty()) {
        std::error_code ec;
        std::filesystem::remove(temp, ec);
      }
    }
    rec.end_ms = now_ms();
    return rec;
  };

  auto worker = [&] {
    std::unique_lock lock(mu);
    while (true) {
      cv.wait(lock, [&] { return !ready.empty() || finished == n; });
      if (finished == n) return;
      const std::size_t i = *ready.begin();
      ready.erase(ready.begin());
      lock.unlock();
      TaskRecord rec = run_one(i);
      lock.lock();
      report.records[i] = std::move(rec);
      finish(i);
      cv.notify_all();
    }
  };

  if (n == 0) return report;
  {
    std::vector<std::jthread> pool;
    const int threads = std::min<int>(options.max_parallel, static_cast<int>(n));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return report;
}

}  // namespace kgxb
