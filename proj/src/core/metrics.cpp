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

#include "core/metrics.hpp"

#include <string>

#include "core/error.hpp"

namespace kgxb {

FsvVector::FsvVector(std::vector<int> values) : values_(std::move(values)) {
  for (int v : values_) {
    if (v < -1 || v > 1) {
      throw RangeError("FSV value " + std::to_string(v) + " outside {-1, 0, 1}");
    }
  }
}

namespace {

std::size_t label_index(int label) { return static_cast<std::size_t>(label + 1); }

void require_non_empty(const FsvVector& v, const char* what) {
  if (v.empty()) throw ArgumentError(std::string(what) + ": empty FSV vector");
}

}  // namespace

ClassificationReport classification_report(const FsvVector& predicted, const FsvVector& gold,
                                           double beta) {
  require_non_empty(predicted, "classification_report");
  if (predicted.size() != gold.size()) {
    throw ArgumentError("classification_report: length mismatch (" +
                        std::to_string(predicted.size()) + " vs " +
                        std::to_string(gold.size()) + ")");
  }
  if (!(beta > 0.0)) throw ArgumentError("classification_report: beta must be positive");

  // confusion[gold][predicted]
  std::size_t confusion[3][3] = {};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++confusion[label_index(gold[i])][label_index(predicted[i])];
  }
  ClassificationReport report;
  report.beta = beta;
  std::size_t correct = 0;
  const double b2 = beta * beta;
  for (int label : kFsvLabels) {
    const std::size_t c = label_index(label);
    std::size_t predicted_count = 0;
    std::size_t gold_count = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      predicted_count += confusion[j][c];
      gold_count += confusion[c][j];
    }
    const std::size_t tp = confusion[c][c];
    correct += tp;
    ClassMetrics m;
    m.support = gold_count;
    m.precision = predicted_count == 0 ? 0.0 : static_cast<double>(tp) / predicted_count;
    m.recall = gold_count == 0 ? 0.0 : static_cast<double>(tp) / gold_count;
    const double denom = b2 * m.precision + m.recall;
    m.f_beta = denom == 0.0 ? 0.0 : (1.0 + b2) * m.precision * m.recall / denom;
    report.per_class[label] = m;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
  return report;
}

double average_fsv(const FsvVector& v) {
  require_non_empty(v, "average_fsv");
  // Computed from the proportions so that average == sum(label * share)
  // holds bit-for-bit.
  const auto dist = fsv_distribution(v);
  return dist.at(1) - dist.at(-1);
}

std::map<int, double> fsv_distribution(const FsvVector& v) {
  require_non_empty(v, "fsv_distribution");
  std::size_t counts[3] = {};
  for (int x : v.values()) ++counts[label_index(x)];
  std::map<int, double> out;
  for (int label : kFsvLabels) {
    out[label] = static_cast<double>(counts[label_index(label)]) / static_cast<double>(v.size());
  }
  return out;
}

FsvSummary summarize_fsv(const FsvVector& v) {
  return FsvSummary{average_fsv(v), fsv_distribution(v)};
}

nlohmann::json to_json(const ClassificationReport& report) {
  nlohmann::json classes = nlohmann::json::object();
  for (const auto& [label, m] : report.per_class) {
    classes[std::to_string(label)] = {{"precision", m.precision},
                                      {"recall", m.recall},
                                      {"f_beta", m.f_beta},
                                      {"support", m.support}};
  }
  return {{"per_class", classes}, {"accuracy", report.accuracy}, {"beta", report.beta}};
}

nlohmann::json to_json(const FsvSummary& summary) {
  nlohmann::json dist = nlohmann::json::object();
  for (const auto& [label, p] : summary.distribution) dist[std::to_string(label)] = p;
  return {{"average_fsv", summary.average}, {"fsv_distribution", dist}};
}

}  // namespace kgxb
