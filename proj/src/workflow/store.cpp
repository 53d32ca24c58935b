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

#include "workflow/store.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <array>
#include <atomic>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"

namespace kgxb {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      EVP_MD_CTX_free(ctx_);
      throw Error(ErrorCode::kInternal, "SHA-256 initialization failed");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_, data, n) != 1) {
      throw Error(ErrorCode::kInternal, "SHA-256 update failed");
    }
  }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_, digest.data(), &len) != 1) {
      throw Error(ErrorCode::kInternal, "SHA-256 finalization failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[digest[i] >> 4];
      out += kHex[digest[i] & 15];
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

std::filesystem::path meta_path(const std::filesystem::path& artifact) {
  return artifact.parent_path() / (artifact.filename().string() + ".meta.json");
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw IoError("read error on " + path.string());
  return h.hex();
}

ArtifactStore::ArtifactStore(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec || !std::filesystem::is_directory(root_)) {
    throw IoError("cannot create working directory " + root_.string());
  }
}

std::filesystem::path ArtifactStore::path_of(const std::string& name) const {
  return root_ / name;
}

std::optional<ArtifactMeta> ArtifactStore::meta(const std::string& name) const {
  std::ifstream in(meta_path(path_of(name)));
  if (!in) return std::nullopt;
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("cache_key") ||
      !j.contains("content_hash") || !j["cache_key"].is_string() ||
      !j["content_hash"].is_string()) {
    return std::nullopt;
  }
  return ArtifactMeta{j["cache_key"].get<std::string>(), j["content_hash"].get<std::string>()};
}

bool ArtifactStore::complete(const std::string& name, const std::string& cache_key) const {
  const auto m = meta(name);
  if (!m || m->cache_key != cache_key) return false;
  const auto path = path_of(name);
  if (!std::filesystem::is_regular_file(path)) return false;
  try {
    return sha256_file(path) == m->content_hash;
  } catch (const IoError&) {
    return false;
  }
}

std::string ArtifactStore::content_hash(const std::string& name) const {
  const auto m = meta(name);
  if (!m) throw IoError("artifact " + name + " has no metadata");
  const std::string actual = sha256_file(path_of(name));
  if (actual != m->content_hash) throw IoError("artifact " + name + " does not match its hash");
  return actual;
}

std::filesystem::path ArtifactStore::temp_path(const std::string& name) const {
  static std::atomic<unsigned long> counter{0};
  return root_ / (".tmp." + name + "." + std::to_string(::getpid()) + "." +
                  std::to_string(counter++));
}

std::mutex& ArtifactStore::lock_for(const std::string& name) {
  std::lock_guard lock(index_mu_);
  auto& slot = name_locks_[name];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

void ArtifactStore::commit(const std::string& name, const std::filesystem::path& temp,
                           const std::string& cache_key) {
  std::lock_guard lock(lock_for(name));
  const auto target = path_of(name);
  const std::string hash = sha256_file(temp);
  std::error_code ec;
  std::filesystem::remove(meta_path(target), ec);
  std::filesystem::rename(temp, target, ec);
  if (ec) throw IoError("cannot move " + temp.string() + " into place: " + ec.message());
  const nlohmann::json meta{{"cache_key", cache_key}, {"content_hash", hash}};
  write_atomic(meta_path(target), meta.dump(2) + "\n");
}

void ArtifactStore::write_atomic(const std::filesystem::path& path, std::string_view bytes) {
  static std::atomic<unsigned long> counter{0};
  const auto temp = path.parent_path() / (".tmp." + path.filename().string() + "." +
                                          std::to_string(::getpid()) + "." +
                                          std::to_string(counter++));
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + temp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed on " + temp.string());
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp, ec);
    throw IoError("cannot move " + temp.string() + " into place");
  }
}

}  // namespace kgxb
