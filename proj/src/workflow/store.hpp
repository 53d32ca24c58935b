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

// Content-addressed artifact store. Each artifact lives in the working
// directory under its output name, next to a "<name>.meta.json" sidecar that
// records the cache key it was built for and the SHA-256 of its bytes.

#ifndef KGXBENCH_WORKFLOW_STORE_HPP_
#define KGXBENCH_WORKFLOW_STORE_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace kgxb {

std::string sha256_hex(std::string_view bytes);
// Throws IoError if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

struct ArtifactMeta {
  std::string cache_key;
  std::string content_hash;
};

class ArtifactStore {
 public:
  // Creates `root` if needed.
  explicit ArtifactStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path_of(const std::string& name) const;

  std::optional<ArtifactMeta> meta(const std::string& name) const;

  // True iff the artifact exists, its sidecar records `cache_key`, and the
  // bytes on disk still hash to the recorded content hash.
  bool complete(const std::string& name, const std::string& cache_key) const;

  // Content hash of a committed artifact (from the sidecar, verified).
  // Throws IoError when the artifact is missing or damaged.
  std::string content_hash(const std::string& name) const;

  // A fresh temporary path in the store directory for building `name`.
  std::filesystem::path temp_path(const std::string& name) const;

  // Moves `temp` into place and records its meta. The old sidecar is
  // removed first, so an interrupted commit never leaves an artifact that
  // validates against a stale key.
  void commit(const std::string& name, const std::filesystem::path& temp,
              const std::string& cache_key);

  // Writes `bytes` to `path` via a temporary file and rename.
  static void write_atomic(const std::filesystem::path& path, std::string_view bytes);

 private:
  std::mutex& lock_for(const std::string& name);

  std::filesystem::path root_;
  mutable std::mutex index_mu_;
  std::map<std::string, std::unique_ptr<std::mutex>> name_locks_;
};

}  // namespace kgxb

#endif  // KGXBENCH_WORKFLOW_STORE_HPP_
