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

#include "core/ground_truth.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "core/error.hpp"

namespace kgxb {

namespace {

using nlohmann::json;

Triple resolve(const KnowledgeGraph& kg, const json& labels, std::size_t line_no) {
  if (!labels.is_array() || labels.size() != 3) {
    throw ParseError(line_no, "triple must be an array of three labels");
  }
  for (const auto& l : labels) {
    if (!l.is_string()) throw ParseError(line_no, "triple labels must be strings");
  }
  const auto s = kg.find_entity(labels[0].get<std::string>());
  const auto p = kg.find_relation(labels[1].get<std::string>());
  const auto o = kg.find_entity(labels[2].get<std::string>());
  if (!s) throw ReferenceError("line " + std::to_string(line_no) + ": unknown entity '" +
                               labels[0].get<std::string>() + "'");
  if (!p) throw ReferenceError("line " + std::to_string(line_no) + ": unknown relation '" +
                               labels[1].get<std::string>() + "'");
  if (!o) throw ReferenceError("line " + std::to_string(line_no) + ": unknown entity '" +
                               labels[2].get<std::string>() + "'");
  return Triple{*s, *p, *o};
}

int categorical(const json& v, std::size_t line_no) {
  const auto q = v.get<long long>();
  if (q < -1 || q > 1) {
    throw RangeError("line " + std::to_string(line_no) + ": categorical quality " +
                     std::to_string(q) + " not in {-1, 0, 1}");
  }
  return static_cast<int>(q);
}

}  // namespace

std::vector<int> discretize_ratings(std::span<const double> ratings) {
  if (ratings.empty()) throw ArgumentError("discretize_ratings: empty input");
  std::vector<double> sorted(ratings.begin(), ratings.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double t1 = sorted[std::min(n - 1, n / 3)];
  const double t2 = sorted[std::min(n - 1, (2 * n) / 3)];
  std::vector<int> labels;
  labels.reserve(n);
  for (double r : ratings) {
    if (t1 == t2) {
      labels.push_back(0);
    } else if (r < t1) {
      labels.push_back(-1);
    } else if (r < t2) {
      labels.push_back(0);
    } else {
      labels.push_back(1);
    }
  }
  return labels;
}

GroundTruthDataset load_ground_truth(std::shared_ptr<const KnowledgeGraph> kg,
                                     const std::filesystem::path& entries_path) {
  if (!kg) throw ArgumentError("load_ground_truth: null graph");
  std::ifstream in(entries_path);
  if (!in) throw IoError("cannot open " + entries_path.string());

  GroundTruthDataset dataset;
  dataset.kg = kg;
  std::vector<double> real_ratings;
  std::vector<std::size_t> real_positions;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed record: ") + e.what());
    }
    if (!record.is_object() || !record.contains("prediction") ||
        !record.contains("explanation")) {
      throw ParseError(line_no, "record needs 'prediction' and 'explanation'");
    }
    GroundTruthEntry entry;
    entry.prediction = resolve(*kg, record["prediction"], line_no);
    const json& expl = record["explanation"];
    if (!expl.is_array()) throw ParseError(line_no, "'explanation' must be an array");
    for (const auto& t : expl) {
      Triple triple = resolve(*kg, t, line_no);
      if (!kg->in_train(triple)) {
        throw ReferenceError("line " + std::to_string(line_no) + ": explanation triple " +
                             kg->describe(triple) + " is not in the train split");
      }
      entry.explanation.push_back(triple);
    }
    std::sort(entry.explanation.begin(), entry.explanation.end());
    entry.explanation.erase(std::unique(entry.explanation.begin(), entry.explanation.end()),
                            entry.explanation.end());

    if (record.contains("quality")) {
      if (!record["quality"].is_number_integer()) {
        throw ParseError(line_no, "'quality' must be an integer");
      }
      entry.quality = categorical(record["quality"], line_no);
    } else if (record.contains("rating")) {
      const json& r = record["rating"];
      if (r.is_number_integer()) {
        entry.quality = categorical(r, line_no);
      } else if (r.is_number()) {
        const double v = r.get<double>();
        if (!(v >= 0.0 && v <= 1.0)) {
          throw RangeError("line " + std::to_string(line_no) + ": rating " +
                           std::to_string(v) + " outside [0, 1]");
        }
        real_ratings.push_back(v);
        real_positions.push_back(dataset.entries.size());
      } else {
        throw ParseError(line_no, "'rating' must be a number");
      }
    } else {
      entry.quality = 1;
    }
    dataset.entries.push_back(std::move(entry));
  }
  if (dataset.entries.empty()) {
    throw ValidationError("ground truth " + entries_path.string() + " has no entries");
  }
  if (!real_ratings.empty()) {
    const auto labels = discretize_ratings(real_ratings);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      dataset.entries[real_positions[i]].quality = labels[i];
    }
  }
  return dataset;
}

}  // namespace kgxb
