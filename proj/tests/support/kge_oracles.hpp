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

// Independent reference computations for embedding models.

#ifndef KGXBENCH_TESTS_SUPPORT_KGE_ORACLES_HPP_
#define KGXBENCH_TESTS_SUPPORT_KGE_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "core/kg.hpp"
#include "core/kge.hpp"
#include "core/random.hpp"

namespace kgxb::testing {

// Independent scorer: direct formulas, complex rows as (re..., im...).
inline double oracle_score(const KgeModel& m, const Triple& t) {
  const auto s = m.entity(t.subject);
  const auto r = m.relation(t.predicate);
  const auto o = m.entity(t.object);
  const std::size_t d = m.dimension();
  if (m.kind() == ModelKind::kTranslational) {
    double acc = 0;
    for (std::size_t i = 0; i < d; ++i) acc += std::pow(s[i] + r[i] - o[i], 2);
    return -std::sqrt(acc);
  }
  std::complex<double> acc = 0;
  for (std::size_t i = 0; i < d; ++i) {
    acc += std::complex<double>(s[i], s[d + i]) * std::complex<double>(r[i], r[d + i]) *
           std::conj(std::complex<double>(o[i], o[d + i]));
  }
  return acc.real();
}

// Realistic filtered rank by sorting the surviving candidates' scores.
inline double oracle_rank(const KgeModel& m, const KnowledgeGraph& kg, const Triple& t) {
  std::vector<double> scores;
  for (std::uint32_t e = 0; e < kg.num_entities(); ++e) {
    const Triple c{t.subject, t.predicate, EntityId{e}};
    if (e != t.object.value && kg.is_known(c)) continue;
    scores.push_back(oracle_score(m, c));
  }
  const double target = oracle_score(m, t);
  std::sort(scores.begin(), scores.end(), std::greater<>());
  const auto first = std::find(scores.begin(), scores.end(), target) - scores.begin();
  const auto last = scores.rend() - std::find(scores.rbegin(), scores.rend(), target);
  return (static_cast<double>(first + 1) + static_cast<double>(last)) / 2.0;
}

// Relative L2 error between the analytic batch-loss gradient and central
// finite differences on every parameter of a random instance.
struct GradientError {
  double entities = 0;
  double relations = 0;
  double worst() const { return std::max(entities, relations); }
};

inline GradientError gradient_error(ModelKind kind, Rng& rng) {
  HyperParams hp;
  hp.dimension = 4;
  hp.seed = rng.next();
  hp.regularization = 0.01 * static_cast<double>(rng.uniform_index(3));
  hp.margin = 0.5 + static_cast<double>(rng.uniform_index(3));
  KgeModel m = initialize_model(kind, 5, 2, hp);
  for (double& v : m.entity_matrix()) v *= 3;
  for (double& v : m.relation_matrix()) v *= 3;
  const std::size_t k = 2;
  std::vector<Triple> pos, neg;
  auto draw = [&] {
    return Triple{EntityId{static_cast<std::uint32_t>(rng.uniform_index(5))},
                  RelationId{static_cast<std::uint32_t>(rng.uniform_index(2))},
                  EntityId{static_cast<std::uint32_t>(rng.uniform_index(5))}};
  };
  for (int i = 0; i < 3; ++i) {
    pos.push_back(draw());
    for (std::size_t j = 0; j < k; ++j) neg.push_back(draw());
  }
  // Hinge kinks have no derivative; keep every hinge clearly on one side.
  if (kind == ModelKind::kTranslational) {
    for (std::size_t i = 0; i < pos.size(); ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const double h = hp.margin - oracle_score(m, pos[i]) + oracle_score(m, neg[i * k + j]);
        if (std::abs(h) < 1e-3) return gradient_error(kind, rng);
      }
    }
  }
  const TrainingBatch batch{pos, neg, k};
  ModelGradient g(m);
  batch_loss(m, batch, &g);
  const double h = 1e-6;
  auto numeric = [&](std::span<double> params, std::span<const double> analytic) {
    double diff = 0, na = 0, nn = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = params[i];
      params[i] = keep + h;
      const double up = batch_loss(m, batch, nullptr);
      params[i] = keep - h;
      const double down = batch_loss(m, batch, nullptr);
      params[i] = keep;
      const double fd = (up - down) / (2 * h);
      diff += std::pow(fd - analytic[i], 2);
      na += analytic[i] * analytic[i];
      nn += fd * fd;
    }
    const double denom = std::max({std::sqrt(na), std::sqrt(nn), 1e-12});
    return std::sqrt(diff) / denom;
  };
  GradientError err;
  err.entities = numeric(m.entity_matrix(), g.entities);
  err.relations = numeric(m.relation_matrix(), g.relations);
  return err;
}

}  // namespace kgxb::testing

#endif  // KGXBENCH_TESTS_SUPPORT_KGE_ORACLES_HPP_
