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

#ifndef KGXBENCH_CORE_GROUND_TRUTH_HPP_
#define KGXBENCH_CORE_GROUND_TRUTH_HPP_

#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "core/kg.hpp"

namespace kgxb {

struct GroundTruthEntry {
  Triple prediction;
  std::vector<Triple> explanation;  // sorted, unique
  int quality = 1;                  // -1, 0 or +1
};

struct GroundTruthDataset {
  std::shared_ptr<const KnowledgeGraph> kg;
  std::vector<GroundTruthEntry> entries;
};

// Tertile discretization of ratings in [0, 1] into {-1, 0, +1}.
//
// Thresholds are order statistics of the sorted ratings r(0..n-1):
// t1 = r(floor(n/3)) and t2 = r(floor(2n/3)), i.e. the nearest rank strictly
// above each tertile fraction. A rating below t1 maps to -1, below t2 to 0,
// anything else to +1. When t1 == t2 every rating maps to 0.
std::vector<int> discretize_ratings(std::span<const double> ratings);

// Reads a JSON-lines file. Each record holds
//   "prediction":  [s, p, o] labels
//   "explanation": [[s, p, o], ...] labels, all in the train split
// and optionally "quality" (integer -1/0/1) or "rating". An integer rating is
// categorical and passes through; a real rating must lie in [0, 1] and is
// discretized together with the other real ratings. Records with neither
// field get quality +1.
GroundTruthDataset load_ground_truth(std::shared_ptr<const KnowledgeGraph> kg,
                                     const std::filesystem::path& entries_path);

}  // namespace kgxb

#endif  // KGXBENCH_CORE_GROUND_TRUTH_HPP_
