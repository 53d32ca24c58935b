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

// Confusion-matrix reference for classification reports.

#ifndef KGXBENCH_TESTS_SUPPORT_METRICS_ORACLE_HPP_
#define KGXBENCH_TESTS_SUPPORT_METRICS_ORACLE_HPP_

#include <cmath>

#include "core/fsv_vector.hpp"
#include "core/metrics.hpp"

namespace kgxb::testing {

inline ClassificationReport oracle_report(const FsvVector& predicted, const FsvVector& gold,
                                          double beta) {
  // confusion[g + 1][p + 1] counts gold label g predicted as p.
  long confusion[3][3] = {};
  for (std::size_t i = 0; i < gold.size(); ++i) ++confusion[gold[i] + 1][predicted[i] + 1];
  ClassificationReport r;
  r.beta = beta;
  long diagonal = 0;
  for (int l = 0; l < 3; ++l) {
    const long tp = confusion[l][l];
    diagonal += tp;
    long column = 0;
    long row = 0;
    for (int j = 0; j < 3; ++j) {
      column += confusion[j][l];
      row += confusion[l][j];
    }
    ClassMetrics m;
    m.support = static_cast<std::size_t>(row);
    m.precision = column > 0 ? static_cast<double>(tp) / static_cast<double>(column) : 0.0;
    m.recall = row > 0 ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
    const double b2 = beta * beta;
    if (m.precision == 0.0 && m.recall == 0.0) {
      m.f_beta = 0.0;
    } else {
      m.f_beta = (1.0 + b2) * m.precision * m.recall / (b2 * m.precision + m.recall);
    }
    r.per_class[l - 1] = m;
  }
  r.accuracy = static_cast<double>(diagonal) / static_cast<double>(gold.size());
  return r;
}

}  // namespace kgxb::testing

#endif  // KGXBENCH_TESTS_SUPPORT_METRICS_ORACLE_HPP_
