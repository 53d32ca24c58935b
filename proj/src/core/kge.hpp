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

// Embedding models for link prediction: scoring, training, tuning, ranking
// and partial re-training of a single entity row.

#ifndef KGXBENCH_CORE_KGE_HPP_
#define KGXBENCH_CORE_KGE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/kg.hpp"

namespace kgxb {

enum class ModelKind {
  kTranslational,  // TransE: -||e_s + r_p - e_o||_2
  kComplex,        // ComplEx: Re(<e_s, r_p, conj(e_o)>)
};

std::string_view model_kind_name(ModelKind kind);
// Accepts "TransE" / "ComplEx" (case-insensitive) and the enum spellings.
ModelKind parse_model_kind(std::string_view name);

struct HyperParams {
  int dimension = 64;
  int epochs = 100;
  double learning_rate = 0.01;
  int batch_size = 128;
  int negatives_per_positive = 5;
  double margin = 1.0;  // translational only
  double regularization = 0.0;
  std::uint64_t seed = 0;

  // Throws ArgumentError on a non-positive size or rate.
  void validate() const;
  bool operator==(const HyperParams&) const = default;
};

// Row-major parameter matrices. A translational row holds d reals; a complex
// row holds d real parts followed by d imaginary parts.
class KgeModel {
 public:
  KgeModel(ModelKind kind, std::size_t num_entities, std::size_t num_relations,
           HyperParams hp);

  ModelKind kind() const { return kind_; }
  const HyperParams& hyperparams() const { return hp_; }
  std::size_t num_entities() const { return num_entities_; }
  std::size_t num_relations() const { return num_relations_; }
  std::size_t dimension() const { return static_cast<std::size_t>(hp_.dimension); }
  std::size_t row_width() const { return width_; }

  std::span<const double> entity(EntityId e) const;
  std::span<double> entity(EntityId e);
  std::span<const double> relation(RelationId r) const;
  std::span<double> relation(RelationId r);

  std::span<const double> entity_matrix() const { return entities_; }
  std::span<double> entity_matrix() { return entities_; }
  std::span<const double> relation_matrix() const { return relations_; }
  std::span<double> relation_matrix() { return relations_; }

  bool all_finite() const;
  bool operator==(const KgeModel&) const = default;

 private:
  ModelKind kind_;
  HyperParams hp_;
  std::size_t num_entities_;
  std::size_t num_relations_;
  std::size_t width_;
  std::vector<double> entities_;
  std::vector<double> relations_;
};

// Raw triple score from parameter rows; higher is more plausible.
double score_rows(ModelKind kind, std::span<const double> s, std::span<const double> r,
                  std::span<const double> o);

// Throws ArgumentError if an id is out of range for the model.
double score(const KgeModel& model, EntityId s, RelationId p, EntityId o);

// Scores of <s, p, e> for every entity e, written to `out` (size |V|).
void score_objects(const KgeModel& model, Query q, std::span<double> out);

// Seeded uniform initialization in [-1/sqrt(d), 1/sqrt(d)).
KgeModel initialize_model(ModelKind kind, std::size_t num_entities,
                          std::size_t num_relations, const HyperParams& hp);

// Mini-batch of positives with `negatives_per_positive` corruptions each;
// negatives[i * k + j] is the j-th corruption of positives[i].
struct TrainingBatch {
  std::span<const Triple> positives;
  std::span<const Triple> negatives;
  std::size_t negatives_per_positive = 1;
};

struct ModelGradient {
  std::vector<double> entities;
  std::vector<double> relations;

  explicit ModelGradient(const KgeModel& model)
      : entities(model.entity_matrix().size(), 0.0),
        relations(model.relation_matrix().size(), 0.0) {}
};

// Mean batch loss: margin ranking for translational models, binary
// cross-entropy with logits for complex ones, plus L2 regularization of the
// positives' rows. If `grad` is non-null the analytic gradient is added to it.
double batch_loss(const KgeModel& model, const TrainingBatch& batch, ModelGradient* grad);

struct TrainingReport {
  std::vector<double> epoch_loss;  // mean loss per epoch
};

// Mini-batch Adam (beta 0.9 / 0.999, eps 1e-8) with uniform subject-or-object
// corruption. Deterministic for fixed inputs. Throws ArgumentError on an empty
// train split or invalid hyperparameters.
KgeModel train(const KnowledgeGraph& kg, ModelKind kind, const HyperParams& hp,
               TrainingReport* report = nullptr);

struct RankedTriple {
  Triple triple;
  double rank = 1.0;
};

struct RankDetail {
  double optimistic = 1.0;
  double pessimistic = 1.0;
  double realistic() const { return (optimistic + pessimistic) / 2.0; }
};

// Filtered object-side rank: other objects forming a known triple in any
// split are removed before counting.
RankDetail rank_detail(const KgeModel& model, const KnowledgeGraph& kg, const Triple& t);
RankedTriple rank(const KgeModel& model, const KnowledgeGraph& kg, const Triple& t);

// Mean reciprocal realistic filtered rank over `triples` (0 if empty).
double filtered_mrr(const KgeModel& model, const KnowledgeGraph& kg,
                    std::span<const Triple> triples);

// Highest scoring object for <s, p, ?>, skipping objects already known for the
// query in train or validation (unless that would skip every entity). Ties go
// to the smaller id.
EntityId lp(const KgeModel& model, const KnowledgeGraph& kg, Query q);

// Keeps triples with rank <= threshold in input order, at most n_max of them.
std::vector<Triple> select_predictions(std::span<const RankedTriple> ranked,
                                       double threshold = 1.0, std::size_t n_max = 100);

struct TuneTrial {
  HyperParams hp;
  double validation_mrr = 0.0;
};

struct TuneResult {
  HyperParams best;
  std::vector<TuneTrial> trials;  // in sampling order
};

// The search grid: dimension x learning rate x margin x negatives.
std::vector<HyperParams> tuning_grid(const HyperParams& base);

// Seeded random search without replacement over tuning_grid(base); the
// objective is filtered validation MRR, ties keep the earlier sample.
TuneResult tune(const KnowledgeGraph& kg, ModelKind kind, int budget, std::uint64_t seed,
                const HyperParams& base = {});

struct PostTrainOptions {
  int epochs = 50;
  double learning_rate = 0.05;
};

// Copy of `model` in which only the focus entity's row is re-initialized and
// re-trained on its incident train triples (minus `removed`, plus `added`).
// Every other parameter is left bit-identical.
KgeModel post_train(const KgeModel& model, const KnowledgeGraph& kg, EntityId focus,
                    std::span<const Triple> removed, std::span<const Triple> added,
                    const PostTrainOptions& options = {});

}  // namespace kgxb

#endif  // KGXBENCH_CORE_KGE_HPP_
