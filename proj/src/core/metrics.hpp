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

#ifndef KGXBENCH_CORE_METRICS_HPP_
#define KGXBENCH_CORE_METRICS_HPP_

#include <array>
#include <map>

#include <json.hpp>

#include "core/fsv_vector.hpp"

namespace kgxb {

inline constexpr std::array<int, 3> kFsvLabels = {-1, 0, 1};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
  std::size_t support = 0;  // gold instances of the class
  bool operator==(const ClassMetrics&) const = default;
};

struct ClassificationReport {
  std::map<int, ClassMetrics> per_class;  // keys -1, 0, +1
  double accuracy = 0.0;
  double beta = 1.0;
  bool operator==(const ClassificationReport&) const = default;
};

// Per-class precision/recall/F-beta over {-1, 0, +1}. Zero predicted
// instances give precision 0, zero gold instances recall 0, and P = R = 0
// gives F 0. Throws ArgumentError on empty or mismatched input.
ClassificationReport classification_report(const FsvVector& predicted, const FsvVector& gold,
                                           double beta = 1.0);

double average_fsv(const FsvVector& v);

// Proportion of each label; absent labels map to 0.
std::map<int, double> fsv_distribution(const FsvVector& v);

struct FsvSummary {
  double average = 0.0;
  std::map<int, double> distribution;
};

FsvSummary summarize_fsv(const FsvVector& v);

nlohmann::json to_json(const ClassificationReport& report);
nlohmann::json to_json(const FsvSummary& summary);

}  // namespace kgxb

#endif  // KGXBENCH_CORE_METRICS_HPP_
