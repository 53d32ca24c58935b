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

// Knowledge graph data model: interned labels, the three triple splits and
// the lookup indexes used by ranking and explanation search.

#ifndef KGXBENCH_CORE_KG_HPP_
#define KGXBENCH_CORE_KG_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace kgxb {

template <class Tag>
struct Id {
  std::uint32_t value = 0;
  constexpr auto operator<=>(const Id&) const = default;
};

using EntityId = Id<struct EntityTag>;
using RelationId = Id<struct RelationTag>;

struct Triple {
  EntityId subject;
  RelationId predicate;
  EntityId object;

  constexpr auto operator<=>(const Triple&) const = default;
  constexpr bool involves(EntityId e) const { return subject == e || object == e; }
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t h = (std::uint64_t{t.subject.value} << 32) ^ t.object.value;
    h ^= std::uint64_t{t.predicate.value} * 0x9e3779b97f4a7c15ULL;
    return std::hash<std::uint64_t>{}(h);
  }
};

using TripleSet = std::unordered_set<Triple, TripleHash>;

struct Query {
  EntityId subject;
  RelationId predicate;

  constexpr auto operator<=>(const Query&) const = default;
};

enum class Split { kTrain, kValidation, kTest };

class KnowledgeGraph {
 public:
  // Throws ValidationError when splits overlap or an id is out of range.
  KnowledgeGraph(std::string name, std::vector<std::string> entity_labels,
                 std::vector<std::string> relation_labels, std::vector<Triple> train,
                 std::vector<Triple> validation, std::vector<Triple> test);

  const std::string& name() const { return name_; }
  std::size_t num_entities() const { return entity_labels_.size(); }
  std::size_t num_relations() const { return relation_labels_.size(); }

  const std::string& entity_label(EntityId e) const;
  const std::string& relation_label(RelationId r) const;
  std::span<const std::string> entity_labels() const { return entity_labels_; }
  std::span<const std::string> relation_labels() const { return relation_labels_; }
  std::optional<EntityId> find_entity(std::string_view label) const;
  std::optional<RelationId> find_relation(std::string_view label) const;

  std::span<const Triple> train() const { return train_; }
  std::span<const Triple> validation() const { return validation_; }
  std::span<const Triple> test() const { return test_; }
  std::span<const Triple> split(Split s) const;

  bool in_train(const Triple& t) const { return train_set_.contains(t); }
  bool is_known(const Triple& t) const;

  // Sorted objects o with <s, p, o> in train or validation.
  std::span<const EntityId> train_valid_objects(Query q) const;
  // Sorted objects o with <s, p, o> in any split.
  std::span<const EntityId> known_objects(Query q) const;

  // Train triples featuring `e` as subject or object, in train-file order.
  const std::vector<Triple>& incident_train(EntityId e) const;
  std::size_t train_degree(EntityId e) const { return incident_train(e).size(); }

  bool valid_entity(EntityId e) const { return e.value < entity_labels_.size(); }
  bool valid_relation(RelationId r) const { return r.value < relation_labels_.size(); }
  bool valid_triple(const Triple& t) const {
    return valid_entity(t.subject) && valid_relation(t.predicate) && valid_entity(t.object);
  }

  // Same id tables, train split edited. Used by re-training oracles and
  // by the sufficient-relevance transplant.
  KnowledgeGraph with_train(std::vector<Triple> train) const;

  std::string describe(const Triple& t) const;

 private:
  static std::uint64_t key(Query q) {
    return (std::uint64_t{q.subject.value} << 32) | q.predicate.value;
  }
  void build_indexes();

  std::string name_;
  std::vector<std::string> entity_labels_;
  std::vector<std::string> relation_labels_;
  std::vector<Triple> train_;
  std::vector<Triple> validation_;
  std::vector<Triple> test_;

  std::unordered_map<std::string, EntityId> entity_index_;
  std::unordered_map<std::string, RelationId> relation_index_;
  TripleSet train_set_;
  TripleSet valid_set_;
  TripleSet test_set_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> train_valid_objects_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> known_objects_;
  std::vector<std::vector<Triple>> incident_;
};

// Incremental builder that interns labels in first-appearance order.
class KgBuilder {
 public:
  EntityId entity(std::string_view label);
  RelationId relation(std::string_view label);
  // Repeated triples inside one split are dropped.
  void add(Split split, std::string_view s, std::string_view p, std::string_view o);
  KnowledgeGraph build(std::string name) &&;

 private:
  std::vector<std::string> entities_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, EntityId> entity_index_;
  std::unordered_map<std::string, RelationId> relation_index_;
  std::vector<Triple> splits_[3];
  TripleSet seen_[3];
};

// Loads three tab-separated triple files. Ids are assigned by first
// appearance, scanning train, then validation, then test.
KnowledgeGraph load_kg(const std::filesystem::path& train_path,
                       const std::filesystem::path& validation_path,
                       const std::filesystem::path& test_path, std::string name);

// Writes train.txt / valid.txt / test.txt into `dir`.
void save_kg(const KnowledgeGraph& kg, const std::filesystem::path& dir);

}  // namespace kgxb

#endif  // KGXBENCH_CORE_KG_HPP_
