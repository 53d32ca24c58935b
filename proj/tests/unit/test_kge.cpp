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

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include "core/checkpoint.hpp"
#include "core/error.hpp"
#include "core/kg.hpp"
#include "core/kge.hpp"
#include "support/kge_oracles.hpp"
#include "support/toy.hpp"

namespace kgxb {
namespace {

using testing::chain_kg;
using testing::coarse_model;
using testing::oracle_rank;
using testing::oracle_score;
using testing::random_kg;

KgeModel with_rows(ModelKind kind, std::vector<std::vector<double>> ents,
                   std::vector<std::vector<double>> rels, int dim) {
  HyperParams hp;
  hp.dimension = dim;
  KgeModel m(kind, ents.size(), rels.size(), hp);
  for (std::size_t i = 0; i < ents.size(); ++i) {
    std::copy(ents[i].begin(), ents[i].end(),
              m.entity(EntityId{static_cast<std::uint32_t>(i)}).begin());
  }
  for (std::size_t i = 0; i < rels.size(); ++i) {
    std::copy(rels[i].begin(), rels[i].end(),
              m.relation(RelationId{static_cast<std::uint32_t>(i)}).begin());
  }
  return m;
}

TEST_CASE("score: translational and complex hand values") {
  const auto t1 = with_rows(ModelKind::kTranslational, {{0, 0}, {1, 0}}, {{1, 0}}, 2);
  CHECK(score(t1, EntityId{0}, RelationId{0}, EntityId{1}) == 0.0);
  const auto t2 = with_rows(ModelKind::kTranslational, {{0, 0}, {3, 4}}, {{0, 0}}, 2);
  CHECK(score(t2, EntityId{0}, RelationId{0}, EntityId{1}) == doctest::Approx(-5.0));
  const auto c = with_rows(ModelKind::kComplex, {{1, 0}}, {{1, 0}}, 1);
  CHECK(score(c, EntityId{0}, RelationId{0}, EntityId{0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(score(c, EntityId{3}, RelationId{0}, EntityId{0}), ArgumentError);
}

TEST_CASE("score: matches direct formulas on random models") {
  Rng rng(3);
  for (ModelKind kind : {ModelKind::kTranslational, ModelKind::kComplex}) {
    HyperParams hp;
    hp.dimension = 4;
    hp.seed = 9;
    const KgeModel m = initialize_model(kind, 6, 2, hp);
    for (int i = 0; i < 50; ++i) {
      const Triple t{EntityId{static_cast<std::uint32_t>(rng.uniform_index(6))},
                     RelationId{static_cast<std::uint32_t>(rng.uniform_index(2))},
                     EntityId{static_cast<std::uint32_t>(rng.uniform_index(6))}};
      CHECK(score(m, t.subject, t.predicate, t.object) ==
            doctest::Approx(oracle_score(m, t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("rank: matches brute-force sort on random toy models") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int ne = 2 + static_cast<int>(rng.uniform_index(9));
    const KnowledgeGraph kg = random_kg(rng, ne, 2, ne * 2);
    const ModelKind kind = trial % 2 ? ModelKind::kComplex : ModelKind::kTranslational;
    const KgeModel m = coarse_model(rng, kind, kg.num_entities(), kg.num_relations(),
                                    1 + static_cast<int>(rng.uniform_index(4)));
    for (Split s : {Split::kTrain, Split::kValidation, Split::kTest}) {
      for (const Triple& t : kg.split(s)) {
        const RankDetail d = rank_detail(m, kg, t);
        CHECK(d.optimistic <= d.realistic());
        CHECK(d.realistic() <= d.pessimistic);
        CHECK(rank(m, kg, t).rank == oracle_rank(m, kg, t));
      }
    }
  }
}

TEST_CASE("rank: unique maximum is 1, constant scorer is (1+n)/2") {
  const KnowledgeGraph kg = chain_kg({5, false, {}, {}});
  const auto best = with_rows(ModelKind::kTranslational,
                              {{0}, {1}, {10}, {20}, {30}}, {{1}}, 1);
  CHECK(rank(best, kg, kg.train()[0]).rank == 1.0);
  const auto flat = with_rows(ModelKind::kTranslational, {{0}, {0}, {0}, {0}, {0}}, {{0}}, 1);
  CHECK(rank(flat, kg, kg.train()[0]).rank == 3.0);
}

TEST_CASE("lp: brute-force argmax, filtered, ties to smallest id") {
  KgBuilder b;
  for (const char* e : {"a", "b", "c", "d", "x"}) b.entity(e);
  b.add(Split::kTrain, "a", "p", "c");
  const KnowledgeGraph kg = std::move(b).build("lp");
  const auto m = with_rows(ModelKind::kTranslational,
                           {{0, 0}, {1, 0}, {1, 0.1}, {9, 9}, {-7, 3}}, {{1, 0}}, 2);
  // c is known, so it is filtered even though it scores close to b.
  CHECK(lp(m, kg, Query{EntityId{0}, RelationId{0}}) == EntityId{1});
  const auto tie = with_rows(ModelKind::kTranslational,
                             {{0, 0}, {5, 5}, {1, 0}, {1, 0}, {5, 5}}, {{1, 0}}, 2);
  // c (2) is filtered; d (3) ties with nothing better.
  CHECK(lp(tie, kg, Query{EntityId{0}, RelationId{0}}) == EntityId{3});

  KgBuilder one;
  one.add(Split::kTrain, "a", "p", "a");
  const KnowledgeGraph single = std::move(one).build("one");
  HyperParams hp;
  hp.dimension = 2;
  CHECK(lp(initialize_model(ModelKind::kComplex, 1, 1, hp), single,
           Query{EntityId{0}, RelationId{0}}) == EntityId{0});
}

TEST_CASE("lp: its answer always has rank 1 among unfiltered candidates") {
  Rng rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const KnowledgeGraph kg = random_kg(rng, 8, 2, 14);
    const KgeModel m = coarse_model(rng, ModelKind::kComplex, kg.num_entities(),
                                    kg.num_relations(), 2);
    for (std::uint32_t s = 0; s < kg.num_entities(); ++s) {
      const Query q{EntityId{s}, RelationId{0}};
      const EntityId o = lp(m, kg, q);
      const auto known = kg.train_valid_objects(q);
      double best = -1e300;
      for (std::uint32_t e = 0; e < kg.num_entities(); ++e) {
        if (known.size() < kg.num_entities() &&
            std::binary_search(known.begin(), known.end(), EntityId{e})) {
          continue;
        }
        best = std::max(best, oracle_score(m, {EntityId{s}, RelationId{0}, EntityId{e}}));
      }
      CHECK(oracle_score(m, {EntityId{s}, RelationId{0}, o}) == best);
    }
  }
}

TEST_CASE("select_predictions: filter, order and truncation") {
  const Triple t0{EntityId{0}, RelationId{0}, EntityId{1}};
  const Triple t1{EntityId{1}, RelationId{0}, EntityId{2}};
  const Triple t2{EntityId{2}, RelationId{0}, EntityId{3}};
  const Triple t3{EntityId{3}, RelationId{0}, EntityId{4}};
  const std::vector<RankedTriple> ranked = {{t0, 1}, {t1, 3}, {t2, 1}, {t3, 2}};
  CHECK(select_predictions(ranked) == std::vector<Triple>{t0, t2});
  CHECK(select_predictions({}).empty());
  const std::vector<RankedTriple> two = {{t0, 1}, {t1, 1}};
  CHECK(select_predictions(two, 1.0, 1) == std::vector<Triple>{t0});
}

void check_gradient(ModelKind kind, Rng& rng) {
  const testing::GradientError err = testing::gradient_error(kind, rng);
  CHECK(err.entities < 1e-4);
  CHECK(err.relations < 1e-4);
}

TEST_CASE("gradients match central finite differences") {
  Rng rng(99);
  for (int i = 0; i < 50; ++i) {
    check_gradient(ModelKind::kTranslational, rng);
    check_gradient(ModelKind::kComplex, rng);
  }
}

TEST_CASE("train: loss decreases on the 50-entity chain") {
  const KnowledgeGraph kg = chain_kg({50, false, {}, {}});
  HyperParams hp;
  hp.dimension = 32;
  hp.epochs = 200;
  for (ModelKind kind : {ModelKind::kTranslational, ModelKind::kComplex}) {
    TrainingReport report;
    const KgeModel m = train(kg, kind, hp, &report);
    REQUIRE(report.epoch_loss.size() == 200);
    CHECK(report.epoch_loss.back() < report.epoch_loss.front());
    CHECK(m.all_finite());
    CHECK(m.entity_matrix().size() == 50 * m.row_width());
  }
}

TEST_CASE("train: zero epochs is the seeded initialization, runs are deterministic") {
  const KnowledgeGraph kg = chain_kg({10, false, {}, {}});
  HyperParams hp;
  hp.dimension = 8;
  hp.epochs = 0;
  hp.seed = 4;
  for (ModelKind kind : {ModelKind::kTranslational, ModelKind::kComplex}) {
    CHECK(train(kg, kind, hp) == initialize_model(kind, 10, 1, hp));
    HyperParams h2 = hp;
    h2.epochs = 5;
    CHECK(train(kg, kind, h2) == train(kg, kind, h2));
    HyperParams h3 = h2;
    h3.seed = 5;
    CHECK_FALSE(train(kg, kind, h2) == train(kg, kind, h3));
  }
}

TEST_CASE("train: empty training split and bad hyperparameters are argument errors") {
  KgBuilder b;
  b.add(Split::kTest, "a", "r", "b");
  const KnowledgeGraph kg = std::move(b).build("empty");
  CHECK_THROWS_AS(train(kg, ModelKind::kComplex, {}), ArgumentError);
  HyperParams bad;
  bad.learning_rate = 0;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
}

TEST_CASE("tune: grid, budget 1, argmax and tie rule") {
  const auto grid = tuning_grid({});
  CHECK(grid.size() == 36);
  const KnowledgeGraph kg = testing::heldout_chain();
  HyperParams base;
  base.epochs = 3;
  const TuneResult one = tune(kg, ModelKind::kComplex, 1, 0, base);
  REQUIRE(one.trials.size() == 1);
  CHECK(one.best == one.trials[0].hp);

  const TuneResult two = tune(kg, ModelKind::kComplex, 2, 1, base);
  REQUIRE(two.trials.size() == 2);
  // Independent evaluation of both sampled configs.
  const double m0 = filtered_mrr(train(kg, ModelKind::kComplex, two.trials[0].hp), kg,
                                 kg.validation());
  const double m1 = filtered_mrr(train(kg, ModelKind::kComplex, two.trials[1].hp), kg,
                                 kg.validation());
  CHECK(two.trials[0].validation_mrr == m0);
  CHECK(two.trials[1].validation_mrr == m1);
  CHECK(two.best == (m1 > m0 ? two.trials[1].hp : two.trials[0].hp));

  KgBuilder b;
  b.add(Split::kTrain, "a", "r", "b");
  b.add(Split::kTest, "b", "r", "a");
  const KnowledgeGraph no_valid = std::move(b).build("nv");
  CHECK_THROWS_AS(tune(no_valid, ModelKind::kComplex, 1, 0, base), ArgumentError);
}

TEST_CASE("post_train: frozen rows, empty data, argument errors") {
  const KnowledgeGraph kg = chain_kg({12, false, {}, {}});
  HyperParams hp;
  hp.dimension = 8;
  hp.epochs = 30;
  const KgeModel m = train(kg, ModelKind::kComplex, hp);
  const EntityId focus{5};
  const KgeModel p = post_train(m, kg, focus, {}, {});
  for (std::uint32_t e = 0; e < kg.num_entities(); ++e) {
    if (e == focus.value) continue;
    const auto a = m.entity(EntityId{e});
    const auto b = p.entity(EntityId{e});
    CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
  CHECK(std::equal(m.relation_matrix().begin(), m.relation_matrix().end(),
                   p.relation_matrix().begin()));
  CHECK(p.all_finite());

  // e00 has a single incident triple; removing it leaves the row at its
  // re-initialization.
  const EntityId first{0};
  const Triple only = kg.incident_train(first).front();
  const KgeModel a = post_train(m, kg, first, std::vector<Triple>{only}, {});
  PostTrainOptions none;
  none.epochs = 0;
  const KgeModel b = post_train(m, kg, first, {}, {}, none);
  CHECK(a == b);

  const Triple absent{EntityId{5}, RelationId{0}, EntityId{9}};
  CHECK_THROWS_AS(post_train(m, kg, focus, std::vector<Triple>{absent}, {}), ArgumentError);
}

TEST_CASE("checkpoint: round trip is bit exact") {
  const KnowledgeGraph kg = chain_kg({10, false, {}, {}});
  HyperParams hp;
  hp.dimension = 6;
  hp.epochs = 4;
  hp.seed = 17;
  for (ModelKind kind : {ModelKind::kTranslational, ModelKind::kComplex}) {
    const KgeModel m = train(kg, kind, hp);
    const KgeModel back = deserialize_model(serialize_model(m));
    CHECK(back == m);
    testing::TempDir dir;
    save_model(m, dir.path() / "model");
    CHECK(load_model(dir.path() / "model") == m);
  }
  CHECK(hyperparams_from_json(hyperparams_to_json(hp)) == hp);
  CHECK_THROWS(deserialize_model("not a checkpoint"));
}

}  // namespace
}  // namespace kgxb
