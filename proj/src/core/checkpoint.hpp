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

// Model checkpoint container.
//
//   offset 0   8 bytes   magic "KGXBMDL1"
//   offset 8   8 bytes   header length H, unsigned little-endian
//   offset 16  H bytes   UTF-8 JSON header:
//                        {"format_version", "kind", "num_entities",
//                         "num_relations", "row_width", "hyperparams"}
//   then       entity matrix, then relation matrix; IEEE-754 binary64,
//              little-endian, row-major, num_rows * row_width values each.
//
// See docs/checkpoint-format.md.

#ifndef KGXBENCH_CORE_CHECKPOINT_HPP_
#define KGXBENCH_CORE_CHECKPOINT_HPP_

#include <filesystem>
#include <string>

#include <json.hpp>

#include "core/kge.hpp"

namespace kgxb {

inline constexpr int kCheckpointFormatVersion = 1;

nlohmann::json hyperparams_to_json(const HyperParams& hp);
// Missing keys keep the defaults of `base`.
HyperParams hyperparams_from_json(const nlohmann::json& j, const HyperParams& base = {});

std::string serialize_model(const KgeModel& model);
KgeModel deserialize_model(const std::string& bytes);

void save_model(const KgeModel& model, const std::filesystem::path& path);
KgeModel load_model(const std::filesystem::path& path);

}  // namespace kgxb

#endif  // KGXBENCH_CORE_CHECKPOINT_HPP_
