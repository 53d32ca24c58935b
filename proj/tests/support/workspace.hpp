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

// A scratch working directory seeded with the checked-in toy KGs.

#ifndef KGXBENCH_TESTS_SUPPORT_WORKSPACE_HPP_
#define KGXBENCH_TESTS_SUPPORT_WORKSPACE_HPP_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "support/toy.hpp"

namespace kgxb::testing {

inline std::filesystem::path test_data_dir() { return KGXBENCH_TEST_DATA; }

class Workspace {
 public:
  Workspace() {
    std::filesystem::copy(test_data_dir() / "kgs", data_dir(),
                          std::filesystem::copy_options::recursive);
  }
  std::filesystem::path root() const { return dir_.path(); }
  std::filesystem::path data_dir() const { return dir_.path() / "data"; }
  std::filesystem::path workdir(const std::string& name = "work") const {
    return dir_.path() / name;
  }
  std::filesystem::path write(const std::string& name, const std::string& text) const {
    const auto p = dir_.path() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

 private:
  TempDir dir_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace kgxb::testing

#endif  // KGXBENCH_TESTS_SUPPORT_WORKSPACE_HPP_
