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

// Experiment setup files: one CSV row per test, with key/value config cells.

#ifndef KGXBENCH_WORKFLOW_SETUP_HPP_
#define KGXBENCH_WORKFLOW_SETUP_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "core/fsv.hpp"
#include "core/kge.hpp"
#include "core/lpx.hpp"

namespace kgxb {

enum class Mode { kValidation, kComparison };

std::string_view mode_name(Mode mode);

struct SetupRow {
  std::size_t line = 0;  // CSV line the row starts on
  std::string kg_name;
  std::string kge_name;  // canonical spelling, e.g. "ComplEx"
  ModelKind kge_kind = ModelKind::kComplex;
  std::optional<LpxConfig> lpx_config;  // absent in validation mode
  EvalConfig eval_config;
  std::vector<std::string> metric_names;
};

// Columns: kg_name, kge_name, [lpx_config], eval_config, [metric_names].
// Config cells hold a JSON object or the "{ key=value, ... }" shorthand.
// Throws ParseError (with the offending line) for structural problems,
// unknown keys, methods or prompting values; IoError if the file is missing.
std::vector<SetupRow> parse_setup(const std::filesystem::path& csv_path, Mode mode);
std::vector<SetupRow> parse_setup_text(std::string_view csv, Mode mode);

// A config cell as a JSON object. Shorthand values become numbers or
// booleans when they parse as such and strings otherwise.
nlohmann::json parse_config_cell(std::string_view cell);

// Accepted method spellings besides the registry keys: Kelpie, Kelpie++
// (neighborhood with summarization), Criage and DP (single triple).
LpxConfig lpx_config_from_json(const nlohmann::json& j);
// prompting: zero_shot | few_shot | zero_shot_constrained | few_shot_constrained.
EvalConfig eval_config_from_json(const nlohmann::json& j);

// Complete configs with every key present; used for task identity.
nlohmann::json to_json(const LpxConfig& config);
nlohmann::json to_json(const EvalConfig& config);

// Short, file-name safe renderings used in artifact names, e.g.
// "method=neighborhood" or "prompting=zero_shot,llm=Llama3.1".
std::string render_config(const LpxConfig& config);
std::string render_config(const EvalConfig& config);
std::string render_metric_names(const std::vector<std::string>& names);

std::vector<std::string> default_metric_names(Mode mode);
bool is_known_metric(std::string_view name);

}  // namespace kgxb

#endif  // KGXBENCH_WORKFLOW_SETUP_HPP_
