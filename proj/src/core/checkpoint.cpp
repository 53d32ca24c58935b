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

#include "core/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "core/error.hpp"

namespace kgxb {

namespace {

constexpr char kMagic[8] = {'K', 'G', 'X', 'B', 'M', 'D', 'L', '1'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const std::string& in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= std::uint64_t{static_cast<unsigned char>(in[at + i])} << (8 * i);
  }
  return v;
}

void put_matrix(std::string& out, std::span<const double> values) {
  for (double d : values) put_u64(out, std::bit_cast<std::uint64_t>(d));
}

void get_matrix(const std::string& in, std::size_t at, std::span<double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<double>(get_u64(in, at + 8 * i));
  }
}

}  // namespace

nlohmann::json hyperparams_to_json(const HyperParams& hp) {
  return nlohmann::json{{"dimension", hp.dimension},
                        {"epochs", hp.epochs},
                        {"learning_rate", hp.learning_rate},
                        {"batch_size", hp.batch_size},
                        {"negatives_per_positive", hp.negatives_per_positive},
                        {"margin", hp.margin},
                        {"regularization", hp.regularization},
                        {"seed", hp.seed}};
}

HyperParams hyperparams_from_json(const nlohmann::json& j, const HyperParams& base) {
  if (!j.is_object()) throw ConfigError("hyperparameters must be a JSON object");
  HyperParams hp = base;
  try {
    if (j.contains("dimension")) hp.dimension = j["dimension"].get<int>();
    if (j.contains("epochs")) hp.epochs = j["epochs"].get<int>();
    if (j.contains("learning_rate")) hp.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("batch_size")) hp.batch_size = j["batch_size"].get<int>();
    if (j.contains("negatives_per_positive")) {
      hp.negatives_per_positive = j["negatives_per_positive"].get<int>();
    }
    if (j.contains("margin")) hp.margin = j["margin"].get<double>();
    if (j.contains("regularization")) hp.regularization = j["regularization"].get<double>();
    if (j.contains("seed")) hp.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad hyperparameter value: ") + e.what());
  }
  hp.validate();
  return hp;
}

std::string serialize_model(const KgeModel& model) {
  const nlohmann::json header{{"format_version", kCheckpointFormatVersion},
                              {"kind", std::string(model_kind_name(model.kind()))},
                              {"num_entities", model.num_entities()},
                              {"num_relations", model.num_relations()},
                              {"row_width", model.row_width()},
                              {"hyperparams", hyperparams_to_json(model.hyperparams())}};
  const std::string text = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  put_u64(out, text.size());
  out += text;
  out.reserve(out.size() + 8 * (model.entity_matrix().size() + model.relation_matrix().size()));
  put_matrix(out, model.entity_matrix());
  put_matrix(out, model.relation_matrix());
  return out;
}

KgeModel deserialize_model(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ValidationError("not a model checkpoint");
  }
  const std::uint64_t header_len = get_u64(bytes, 8);
  if (header_len > bytes.size() - 16) throw ValidationError("truncated checkpoint header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(16, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("corrupt checkpoint header: ") + e.what());
  }
  if (header.value("format_version", 0) != kCheckpointFormatVersion) {
    throw ValidationError("unsupported checkpoint format version");
  }
  const ModelKind kind = parse_model_kind(header.at("kind").get<std::string>());
  const HyperParams hp = hyperparams_from_json(header.at("hyperparams"));
  KgeModel model(kind, header.at("num_entities").get<std::size_t>(),
                 header.at("num_relations").get<std::size_t>(), hp);
  if (header.at("row_width").get<std::size_t>() != model.row_width()) {
    throw ValidationError("checkpoint row width does not match its hyperparameters");
  }
  const std::size_t body = 16 + header_len;
  const std::size_t n_ent = model.entity_matrix().size();
  const std::size_t n_rel = model.relation_matrix().size();
  if (bytes.size() != body + 8 * (n_ent + n_rel)) {
    throw ValidationError("checkpoint size does not match its header");
  }
  get_matrix(bytes, body, model.entity_matrix());
  get_matrix(bytes, body + 8 * n_ent, model.relation_matrix());
  return model;
}

void save_model(const KgeModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string bytes = serialize_model(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

KgeModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace kgxb
