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

#include "core/kg.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace kgxb {

namespace {

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "?";
}

void read_split(const std::filesystem::path& path, Split split, KgBuilder& builder) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view rest = line;
    std::string_view fields[3];
    std::size_t n = 0;
    while (true) {
      std::size_t tab = rest.find('\t');
      if (n == 3) {
        n = 4;
        break;
      }
      fields[n++] = rest.substr(0, tab);
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (n != 3) {
      throw ParseError(line_no, path.string() +
                                    ": expected 3 tab-separated columns (subject, "
                                    "predicate, object)");
    }
    for (auto f : fields) {
      if (f.empty()) throw ParseError(line_no, path.string() + ": empty label");
    }
    builder.add(split, fields[0], fields[1], fields[2]);
  }
}

void write_split(const KnowledgeGraph& kg, std::span<const Triple> triples,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const Triple& t : triples) {
    out << kg.entity_label(t.subject) << '\t' << kg.relation_label(t.predicate) << '\t'
        << kg.entity_label(t.object) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

KnowledgeGraph::KnowledgeGraph(std::string name, std::vector<std::string> entity_labels,
                               std::vector<std::string> relation_labels,
                               std::vector<Triple> train, std::vector<Triple> validation,
                               std::vector<Triple> test)
    : name_(std::move(name)),
      entity_labels_(std::move(entity_labels)),
      relation_labels_(std::move(relation_labels)),
      train_(std::move(train)),
      validation_(std::move(validation)),
      test_(std::move(test)) {
  for (std::size_t i = 0; i < entity_labels_.size(); ++i) {
    if (!entity_index_.emplace(entity_labels_[i], EntityId{static_cast<std::uint32_t>(i)})
             .second) {
      throw ValidationError("duplicate entity label '" + entity_labels_[i] + "'");
    }
  }
  for (std::size_t i = 0; i < relation_labels_.size(); ++i) {
    if (!relation_index_
             .emplace(relation_labels_[i], RelationId{static_cast<std::uint32_t>(i)})
             .second) {
      throw ValidationError("duplicate relation label '" + relation_labels_[i] + "'");
    }
  }
  build_indexes();
}

void KnowledgeGraph::build_indexes() {
  TripleSet* sets[3] = {&train_set_, &valid_set_, &test_set_};
  const Split kinds[3] = {Split::kTrain, Split::kValidation, Split::kTest};
  for (int i = 0; i < 3; ++i) {
    for (const Triple& t : split(kinds[i])) {
      if (!valid_triple(t)) {
        throw ValidationError(std::string("triple with out-of-range id in ") +
                              split_name(kinds[i]));
      }
      for (int j = 0; j < i; ++j) {
        if (sets[j]->contains(t)) {
          throw ValidationError("triple " + describe(t) + " appears in both " +
                                split_name(kinds[j]) + " and " + split_name(kinds[i]));
        }
      }
      sets[i]->insert(t);
    }
  }

  incident_.assign(entity_labels_.size(), {});
  for (const Triple& t : train_) {
    incident_[t.subject.value].push_back(t);
    if (t.object != t.subject) incident_[t.object.value].push_back(t);
  }
  for (int i = 0; i < 3; ++i) {
    for (const Triple& t : split(kinds[i])) {
      const std::uint64_t k = key(Query{t.subject, t.predicate});
      known_objects_[k].push_back(t.object);
      if (i < 2) train_valid_objects_[k].push_back(t.object);
    }
  }
  for (auto* index : {&known_objects_, &train_valid_objects_}) {
    for (auto& [k, objects] : *index) {
      std::sort(objects.begin(), objects.end());
      objects.erase(std::unique(objects.begin(), objects.end()), objects.end());
    }
  }
}

const std::string& KnowledgeGraph::entity_label(EntityId e) const {
  if (!valid_entity(e)) throw ArgumentError("entity id out of range");
  return entity_labels_[e.value];
}

const std::string& KnowledgeGraph::relation_label(RelationId r) const {
  if (!valid_relation(r)) throw ArgumentError("relation id out of range");
  return relation_labels_[r.value];
}

std::optional<EntityId> KnowledgeGraph::find_entity(std::string_view label) const {
  auto it = entity_index_.find(std::string(label));
  if (it == entity_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> KnowledgeGraph::find_relation(std::string_view label) const {
  auto it = relation_index_.find(std::string(label));
  if (it == relation_index_.end()) return std::nullopt;
  return it->second;
}

std::span<const Triple> KnowledgeGraph::split(Split s) const {
  switch (s) {
    case Split::kTrain:
      return train_;
    case Split::kValidation:
      return validation_;
    case Split::kTest:
      return test_;
  }
  return {};
}

bool KnowledgeGraph::is_known(const Triple& t) const {
  return train_set_.contains(t) || valid_set_.contains(t) || test_set_.contains(t);
}

std::span<const EntityId> KnowledgeGraph::train_valid_objects(Query q) const {
  auto it = train_valid_objects_.find(key(q));
  if (it == train_valid_objects_.end()) return {};
  return it->second;
}

std::span<const EntityId> KnowledgeGraph::known_objects(Query q) const {
  auto it = known_objects_.find(key(q));
  if (it == known_objects_.end()) return {};
  return it->second;
}

const std::vector<Triple>& KnowledgeGraph::incident_train(EntityId e) const {
  if (!valid_entity(e)) throw ArgumentError("entity id out of range");
  return incident_[e.value];
}

KnowledgeGraph KnowledgeGraph::with_train(std::vector<Triple> train) const {
  return KnowledgeGraph(name_, entity_labels_, relation_labels_, std::move(train),
                        validation_, test_);
}

std::string KnowledgeGraph::describe(const Triple& t) const {
  std::ostringstream os;
  os << '<' << (valid_entity(t.subject) ? entity_labels_[t.subject.value] : "?") << ", "
     << (valid_relation(t.predicate) ? relation_labels_[t.predicate.value] : "?") << ", "
     << (valid_entity(t.object) ? entity_labels_[t.object.value] : "?") << '>';
  return os.str();
}

EntityId KgBuilder::entity(std::string_view label) {
  auto [it, inserted] = entity_index_.try_emplace(
      std::string(label), EntityId{static_cast<std::uint32_t>(entities_.size())});
  if (inserted) entities_.emplace_back(label);
  return it->second;
}

RelationId KgBuilder::relation(std::string_view label) {
  auto [it, inserted] = relation_index_.try_emplace(
      std::string(label), RelationId{static_cast<std::uint32_t>(relations_.size())});
  if (inserted) relations_.emplace_back(label);
  return it->second;
}

void KgBuilder::add(Split split, std::string_view s, std::string_view p,
                    std::string_view o) {
  // Interning order within a line: subject, predicate, object.
  Triple t;
  t.subject = entity(s);
  t.predicate = relation(p);
  t.object = entity(o);
  const auto i = static_cast<std::size_t>(split);
  if (seen_[i].insert(t).second) splits_[i].push_back(t);
}

KnowledgeGraph KgBuilder::build(std::string name) && {
  return KnowledgeGraph(std::move(name), std::move(entities_), std::move(relations_),
                        std::move(splits_[0]), std::move(splits_[1]),
                        std::move(splits_[2]));
}

KnowledgeGraph load_kg(const std::filesystem::path& train_path,
                       const std::filesystem::path& validation_path,
                       const std::filesystem::path& test_path, std::string name) {
  KgBuilder builder;
  read_split(train_path, Split::kTrain, builder);
  read_split(validation_path, Split::kValidation, builder);
  read_split(test_path, Split::kTest, builder);
  return std::move(builder).build(std::move(name));
}

void save_kg(const KnowledgeGraph& kg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_split(kg, kg.train(), dir / "train.txt");
  write_split(kg, kg.validation(), dir / "valid.txt");
  write_split(kg, kg.test(), dir / "test.txt");
}

}  // namespace kgxb
