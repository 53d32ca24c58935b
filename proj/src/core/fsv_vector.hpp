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

#ifndef KGXBENCH_CORE_FSV_VECTOR_HPP_
#define KGXBENCH_CORE_FSV_VECTOR_HPP_

#include <initializer_list>
#include <span>
#include <vector>

namespace kgxb {

// Per-explanation simulatability variations, each in {-1, 0, +1}.
class FsvVector {
 public:
  FsvVector() = default;
  // Throws RangeError if a value is outside {-1, 0, +1}.
  explicit FsvVector(std::vector<int> values);
  FsvVector(std::initializer_list<int> values) : FsvVector(std::vector<int>(values)) {}

  std::span<const int> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  int operator[](std::size_t i) const { return values_[i]; }
  bool operator==(const FsvVector&) const = default;

 private:
  std::vector<int> values_;
};

}  // namespace kgxb

#endif  // KGXBENCH_CORE_FSV_VECTOR_HPP_
