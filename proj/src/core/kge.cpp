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

#include "core/kge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <type_traits>

#include "core/error.hpp"
#include "core/random.hpp"

namespace kgxb {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEpsilon = 1e-8;

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Adds c * d(score)/d(row) to gs, gr, go.
void add_score_gradient(ModelKind kind, std::span<const double> s, std::span<const double> r,
                        std::span<const double> o, double c, std::span<double> gs,
                        std::span<double> gr, std::span<double> go) {
  if (kind == ModelKind::kTranslational) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double u = s[i] + r[i] - o[i];
      norm2 += u * u;
    }
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) return;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double u = (s[i] + r[i] - o[i]) / norm;
      gs[i] -= c * u;
      gr[i] -= c * u;
      go[i] += c * u;
    }
    return;
  }
  const std::size_t d = s.size() / 2;
  for (std::size_t i = 0; i < d; ++i) {
    const double sr = s[i], si = s[d + i];
    const double rr = r[i], ri = r[d + i];
    const double orr = o[i], oi = o[d + i];
    gs[i] += c * (rr * orr + ri * oi);
    gs[d + i] += c * (-ri * orr + rr * oi);
    gr[i] += c * (sr * orr + si * oi);
    gr[d + i] += c * (-si * orr + sr * oi);
    go[i] += c * (sr * rr - si * ri);
    go[d + i] += c * (sr * ri + si * rr);
  }
}

// Accumulates into a dense ModelGradient.
struct DenseSink {
  ModelGradient& grad;
  std::size_t width;

  bool wants(EntityId) const { return true; }
  std::span<double> entity(EntityId e) {
    return std::span<double>(grad.entities).subspan(e.value * width, width);
  }
  std::span<double> relation(RelationId r) {
    return std::span<double>(grad.relations).subspan(r.value * width, width);
  }
};

// Keeps only the gradient of one entity row; the rest is discarded.
struct FocusSink {
  EntityId focus;
  std::vector<double> row;
  std::vector<double> scratch;

  bool wants(EntityId e) const { return e == focus; }
  std::span<double> entity(EntityId e) { return e == focus ? row : scratch; }
  std::span<double> relation(RelationId) { return scratch; }
};

struct NullSink {
  bool wants(EntityId) const { return false; }
};

template <class Sink>
void add_triple_gradient(const KgeModel& m, const Triple& t, double c, Sink& sink) {
  if constexpr (std::is_same_v<Sink, NullSink>) {
    return;
  } else {
    if (c == 0.0) return;
    if constexpr (std::is_same_v<Sink, FocusSink>) {
      if (!sink.wants(t.subject) && !sink.wants(t.object)) return;
    }
    // Subject and object may share a row; accumulate through separate buffers.
    thread_local std::vector<double> gs, gr, go;
    const std::size_t w = m.row_width();
    gs.assign(w, 0.0);
    gr.assign(w, 0.0);
    go.assign(w, 0.0);
    add_score_gradient(m.kind(), m.entity(t.subject), m.relation(t.predicate),
                       m.entity(t.object), c, gs, gr, go);
    auto add = [](std::span<double> dst, const std::vector<double>& src) {
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
    };
    add(sink.entity(t.subject), gs);
    add(sink.relation(t.predicate), gr);
    add(sink.entity(t.object), go);
  }
}

template <class Sink>
void add_regularization_gradient(const KgeModel& m, const Triple& t, double c, Sink& sink) {
  if constexpr (!std::is_same_v<Sink, NullSink>) {
    if (c == 0.0) return;
    auto add = [c](std::span<double> dst, std::span<const double> row) {
      for (std::size_t i = 0; i < row.size(); ++i) dst[i] += 2.0 * c * row[i];
    };
    add(sink.entity(t.subject), m.entity(t.subject));
    add(sink.relation(t.predicate), m.relation(t.predicate));
    add(sink.entity(t.object), m.entity(t.object));
  }
}

double squared_norm(std::span<const double> row) {
  double acc = 0.0;
  for (double v : row) acc += v * v;
  return acc;
}

template <class Sink>
double batch_loss_impl(const KgeModel& m, const TrainingBatch& b, Sink& sink) {
  const std::size_t positives = b.positives.size();
  const std::size_t k = b.negatives_per_positive;
  if (positives == 0) return 0.0;
  if (b.negatives.size() != positives * k) {
    throw ArgumentError("batch_loss: negatives must be positives * negatives_per_positive");
  }
  const HyperParams& hp = m.hyperparams();
  double loss = 0.0;

  if (m.kind() == ModelKind::kTranslational) {
    const double scale = 1.0 / static_cast<double>(positives * k);
    for (std::size_t i = 0; i < positives; ++i) {
      const Triple& pos = b.positives[i];
      const double f_pos = score(m, pos.subject, pos.predicate, pos.object);
      for (std::size_t j = 0; j < k; ++j) {
        const Triple& neg = b.negatives[i * k + j];
        const double f_neg = score(m, neg.subject, neg.predicate, neg.object);
        const double hinge = hp.margin - f_pos + f_neg;
        if (hinge <= 0.0) continue;
        loss += scale * hinge;
        add_triple_gradient(m, pos, -scale, sink);
        add_triple_gradient(m, neg, scale, sink);
      }
    }
  } else {
    const double scale = 1.0 / static_cast<double>(positives * (k + 1));
    for (std::size_t i = 0; i < positives; ++i) {
      const Triple& pos = b.positives[i];
      const double f_pos = score(m, pos.subject, pos.predicate, pos.object);
      loss += scale * softplus(-f_pos);
      add_triple_gradient(m, pos, scale * (sigmoid(f_pos) - 1.0), sink);
      for (std::size_t j = 0; j < k; ++j) {
        const Triple& neg = b.negatives[i * k + j];
        const double f_neg = score(m, neg.subject, neg.predicate, neg.object);
        loss += scale * softplus(f_neg);
        add_triple_gradient(m, neg, scale * sigmoid(f_neg), sink);
      }
    }
  }

  if (hp.regularization > 0.0) {
    const double c = hp.regularization / static_cast<double>(positives);
    for (const Triple& t : b.positives) {
      loss += c * (squared_norm(m.entity(t.subject)) + squared_norm(m.relation(t.predicate)) +
                   squared_norm(m.entity(t.object)));
      add_regularization_gradient(m, t, c, sink);
    }
  }
  return loss;
}

class Adam {
 public:
  explicit Adam(std::size_t size) : m_(size, 0.0), v_(size, 0.0) {}

  void step(std::span<double> params, std::span<const double> grad, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double g = grad[i];
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * g;
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * g * g;
      const double m_hat = m_[i] / c1;
      const double v_hat = v_[i] / c2;
      params[i] -= lr * m_hat / (std::sqrt(v_hat) + kEpsilon);
    }
  }

 private:
  std::vector<double> m_;
  std::vector<double> v_;
  long long t_ = 0;
};

EntityId random_entity(Rng& rng, std::size_t n) {
  return EntityId{static_cast<std::uint32_t>(rng.uniform_index(n))};
}

void check_ids(const KgeModel& m, EntityId s, RelationId p, EntityId o) {
  if (s.value >= m.num_entities() || o.value >= m.num_entities() ||
      p.value >= m.num_relations()) {
    throw ArgumentError("triple id out of range for model");
  }
}

void check_compatible(const KgeModel& m, const KnowledgeGraph& kg) {
  if (m.num_entities() != kg.num_entities() || m.num_relations() != kg.num_relations()) {
    throw ArgumentError("model shape does not match graph '" + kg.name() + "'");
  }
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  return kind == ModelKind::kTranslational ? "TransE" : "ComplEx";
}

ModelKind parse_model_kind(std::string_view name) {
  const std::string n = lower(name);
  if (n == "transe" || n == "translational") return ModelKind::kTranslational;
  if (n == "complex") return ModelKind::kComplex;
  throw ArgumentError("unknown model kind '" + std::string(name) + "'");
}

void HyperParams::validate() const {
  if (dimension <= 0) throw ArgumentError("dimension must be positive");
  if (epochs < 0) throw ArgumentError("epochs must be non-negative");
  if (!(learning_rate > 0.0)) throw ArgumentError("learning_rate must be positive");
  if (batch_size <= 0) throw ArgumentError("batch_size must be positive");
  if (negatives_per_positive <= 0) {
    throw ArgumentError("negatives_per_positive must be positive");
  }
  if (!(margin >= 0.0)) throw ArgumentError("margin must be non-negative");
  if (!(regularization >= 0.0)) throw ArgumentError("regularization must be non-negative");
}

KgeModel::KgeModel(ModelKind kind, std::size_t num_entities, std::size_t num_relations,
                   HyperParams hp)
    : kind_(kind),
      hp_(hp),
      num_entities_(num_entities),
      num_relations_(num_relations),
      width_(static_cast<std::size_t>(hp.dimension) * (kind == ModelKind::kComplex ? 2 : 1)) {
  hp_.validate();
  entities_.assign(num_entities_ * width_, 0.0);
  relations_.assign(num_relations_ * width_, 0.0);
}

std::span<const double> KgeModel::entity(EntityId e) const {
  return std::span<const double>(entities_).subspan(e.value * width_, width_);
}
std::span<double> KgeModel::entity(EntityId e) {
  return std::span<double>(entities_).subspan(e.value * width_, width_);
}
std::span<const double> KgeModel::relation(RelationId r) const {
  return std::span<const double>(relations_).subspan(r.value * width_, width_);
}
std::span<double> KgeModel::relation(RelationId r) {
  return std::span<double>(relations_).subspan(r.value * width_, width_);
}

bool KgeModel::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(entities_.begin(), entities_.end(), finite) &&
         std::all_of(relations_.begin(), relations_.end(), finite);
}

double score_rows(ModelKind kind, std::span<const double> s, std::span<const double> r,
                  std::span<const double> o) {
  if (kind == ModelKind::kTranslational) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double u = s[i] + r[i] - o[i];
      acc += u * u;
    }
    return -std::sqrt(acc);
  }
  const std::size_t d = s.size() / 2;
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double a_re = s[i] * r[i] - s[d + i] * r[d + i];
    const double a_im = s[i] * r[d + i] + s[d + i] * r[i];
    acc += a_re * o[i] + a_im * o[d + i];
  }
  return acc;
}

double score(const KgeModel& model, EntityId s, RelationId p, EntityId o) {
  check_ids(model, s, p, o);
  return score_rows(model.kind(), model.entity(s), model.relation(p), model.entity(o));
}

void score_objects(const KgeModel& model, Query q, std::span<double> out) {
  check_ids(model, q.subject, q.predicate, q.subject);
  if (out.size() != model.num_entities()) {
    throw ArgumentError("score_objects: output size mismatch");
  }
  const auto s = model.entity(q.subject);
  const auto r = model.relation(q.predicate);
  for (std::size_t e = 0; e < out.size(); ++e) {
    out[e] = score_rows(model.kind(), s, r,
                        model.entity(EntityId{static_cast<std::uint32_t>(e)}));
  }
}

KgeModel initialize_model(ModelKind kind, std::size_t num_entities,
                          std::size_t num_relations, const HyperParams& hp) {
  KgeModel model(kind, num_entities, num_relations, hp);
  Rng rng(derive_seed(hp.seed, {0x1417}));
  const double scale = 1.0 / std::sqrt(static_cast<double>(hp.dimension));
  for (double& v : model.entity_matrix()) v = rng.symmetric() * scale;
  for (double& v : model.relation_matrix()) v = rng.symmetric() * scale;
  return model;
}

double batch_loss(const KgeModel& model, const TrainingBatch& batch, ModelGradient* grad) {
  if (grad == nullptr) {
    NullSink sink;
    return batch_loss_impl(model, batch, sink);
  }
  DenseSink sink{*grad, model.row_width()};
  return batch_loss_impl(model, batch, sink);
}

KgeModel train(const KnowledgeGraph& kg, ModelKind kind, const HyperParams& hp,
               TrainingReport* report) {
  hp.validate();
  if (kg.train().empty()) throw ArgumentError("train: empty training split");
  KgeModel model = initialize_model(kind, kg.num_entities(), kg.num_relations(), hp);
  if (report != nullptr) report->epoch_loss.clear();

  const std::size_t n = kg.train().size();
  const std::size_t k = static_cast<std::size_t>(hp.negatives_per_positive);
  const std::size_t batch_size = static_cast<std::size_t>(hp.batch_size);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Triple> positives;
  std::vector<Triple> negatives;
  ModelGradient grad(model);
  Adam entity_opt(model.entity_matrix().size());
  Adam relation_opt(model.relation_matrix().size());
  Rng rng(derive_seed(hp.seed, {0x7a1}));

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t end = std::min(n, start + batch_size);
      positives.clear();
      negatives.clear();
      for (std::size_t i = start; i < end; ++i) {
        const Triple& pos = kg.train()[order[i]];
        positives.push_back(pos);
        for (std::size_t j = 0; j < k; ++j) {
          Triple neg = pos;
          if (rng.uniform_index(2) == 0) {
            neg.subject = random_entity(rng, kg.num_entities());
          } else {
            neg.object = random_entity(rng, kg.num_entities());
          }
          negatives.push_back(neg);
        }
      }
      std::fill(grad.entities.begin(), grad.entities.end(), 0.0);
      std::fill(grad.relations.begin(), grad.relations.end(), 0.0);
      const double loss = batch_loss(model, TrainingBatch{positives, negatives, k}, &grad);
      epoch_loss += loss * static_cast<double>(end - start);
      entity_opt.step(model.entity_matrix(), grad.entities, hp.learning_rate);
      relation_opt.step(model.relation_matrix(), grad.relations, hp.learning_rate);
    }
    if (report != nullptr) report->epoch_loss.push_back(epoch_loss / static_cast<double>(n));
  }
  return model;
}

RankDetail rank_detail(const KgeModel& model, const KnowledgeGraph& kg, const Triple& t) {
  check_compatible(model, kg);
  check_ids(model, t.subject, t.predicate, t.object);
  std::vector<double> scores(kg.num_entities());
  score_objects(model, Query{t.subject, t.predicate}, scores);
  const auto known = kg.known_objects(Query{t.subject, t.predicate});
  const double target = scores[t.object.value];
  std::size_t better = 0;
  std::size_t ties = 0;
  for (std::size_t e = 0; e < scores.size(); ++e) {
    if (e == t.object.value) continue;
    const EntityId id{static_cast<std::uint32_t>(e)};
    if (std::binary_search(known.begin(), known.end(), id)) continue;
    if (scores[e] > target) {
      ++better;
    } else if (scores[e] == target) {
      ++ties;
    }
  }
  return RankDetail{static_cast<double>(better + 1), static_cast<double>(better + ties + 1)};
}

RankedTriple rank(const KgeModel& model, const KnowledgeGraph& kg, const Triple& t) {
  return RankedTriple{t, rank_detail(model, kg, t).realistic()};
}

double filtered_mrr(const KgeModel& model, const KnowledgeGraph& kg,
                    std::span<const Triple> triples) {
  if (triples.empty()) return 0.0;
  double acc = 0.0;
  for (const Triple& t : triples) acc += 1.0 / rank(model, kg, t).rank;
  return acc / static_cast<double>(triples.size());
}

EntityId lp(const KgeModel& model, const KnowledgeGraph& kg, Query q) {
  check_compatible(model, kg);
  check_ids(model, q.subject, q.predicate, q.subject);
  std::vector<double> scores(kg.num_entities());
  score_objects(model, q, scores);
  const auto known = kg.train_valid_objects(q);
  const bool filter = known.size() < scores.size();
  std::size_t best = scores.size();
  for (std::size_t e = 0; e < scores.size(); ++e) {
    if (filter && std::binary_search(known.begin(), known.end(),
                                     EntityId{static_cast<std::uint32_t>(e)})) {
      continue;
    }
    if (best == scores.size() || scores[e] > scores[best]) best = e;
  }
  return EntityId{static_cast<std::uint32_t>(best)};
}

std::vector<Triple> select_predictions(std::span<const RankedTriple> ranked, double threshold,
                                       std::size_t n_max) {
  if (!(threshold >= 1.0)) throw ArgumentError("select_predictions: threshold must be >= 1");
  if (n_max < 1) throw ArgumentError("select_predictions: n_max must be >= 1");
  std::vector<Triple> out;
  for (const RankedTriple& r : ranked) {
    if (out.size() >= n_max) break;
    if (r.rank <= threshold) out.push_back(r.triple);
  }
  return out;
}

std::vector<HyperParams> tuning_grid(const HyperParams& base) {
  std::vector<HyperParams> grid;
  for (int dim : {32, 64, 128}) {
    for (double lr : {1e-3, 5e-3, 1e-2}) {
      for (double margin : {1.0, 2.0}) {
        for (int negatives : {5, 10}) {
          HyperParams hp = base;
          hp.dimension = dim;
          hp.learning_rate = lr;
          hp.margin = margin;
          hp.negatives_per_positive = negatives;
          grid.push_back(hp);
        }
      }
    }
  }
  return grid;
}

TuneResult tune(const KnowledgeGraph& kg, ModelKind kind, int budget, std::uint64_t seed,
                const HyperParams& base) {
  if (budget < 1) throw ArgumentError("tune: budget must be >= 1");
  if (kg.validation().empty()) throw ArgumentError("tune: empty validation split");
  HyperParams seeded = base;
  seeded.seed = seed;
  std::vector<HyperParams> grid = tuning_grid(seeded);
  Rng rng(derive_seed(seed, {0x7e5e}));
  rng.shuffle(std::span<HyperParams>(grid));
  grid.resize(std::min(grid.size(), static_cast<std::size_t>(budget)));

  TuneResult result;
  double best_mrr = -1.0;
  for (const HyperParams& hp : grid) {
    const KgeModel model = train(kg, kind, hp);
    const double mrr = filtered_mrr(model, kg, kg.validation());
    result.trials.push_back(TuneTrial{hp, mrr});
    if (mrr > best_mrr) {
      best_mrr = mrr;
      result.best = hp;
    }
  }
  return result;
}

KgeModel post_train(const KgeModel& model, const KnowledgeGraph& kg, EntityId focus,
                    std::span<const Triple> removed, std::span<const Triple> added,
                    const PostTrainOptions& options) {
  check_compatible(model, kg);
  if (!kg.valid_entity(focus)) throw ArgumentError("post_train: focus entity out of range");
  for (const Triple& t : removed) {
    if (!kg.valid_triple(t) || !kg.in_train(t)) {
      throw ArgumentError("post_train: removed triple " + kg.describe(t) +
                          " is not in the train split");
    }
    if (!t.involves(focus)) {
      throw ArgumentError("post_train: removed triple " + kg.describe(t) +
                          " does not feature the focus entity");
    }
  }
  for (const Triple& t : added) {
    if (!kg.valid_triple(t)) throw ArgumentError("post_train: added triple out of range");
    if (!t.involves(focus)) {
      throw ArgumentError("post_train: added triple " + kg.describe(t) +
                          " does not feature the focus entity");
    }
  }

  const HyperParams& hp = model.hyperparams();
  KgeModel out = model;
  auto row = out.entity(focus);
  Rng init(derive_seed(hp.seed, {0xf0c5, focus.value}));
  const double scale = 1.0 / std::sqrt(static_cast<double>(hp.dimension));
  for (double& v : row) v = init.symmetric() * scale;

  TripleSet removed_set(removed.begin(), removed.end());
  std::vector<Triple> positives;
  for (const Triple& t : kg.incident_train(focus)) {
    if (!removed_set.contains(t)) positives.push_back(t);
  }
  positives.insert(positives.end(), added.begin(), added.end());
  if (positives.empty() || options.epochs <= 0) return out;

  const std::size_t k = static_cast<std::size_t>(hp.negatives_per_positive);
  std::vector<Triple> negatives;
  FocusSink sink{focus, std::vector<double>(out.row_width()),
                 std::vector<double>(out.row_width())};
  Adam opt(out.row_width());
  Rng rng(derive_seed(hp.seed, {0x9057, focus.value}));
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    negatives.clear();
    for (const Triple& pos : positives) {
      for (std::size_t j = 0; j < k; ++j) {
        Triple neg = pos;
        // Corrupt the side that is not the focus entity so every negative
        // carries gradient to the focus row.
        if (pos.subject == focus) {
          neg.object = random_entity(rng, kg.num_entities());
        } else {
          neg.subject = random_entity(rng, kg.num_entities());
        }
        negatives.push_back(neg);
      }
    }
    std::fill(sink.row.begin(), sink.row.end(), 0.0);
    batch_loss_impl(out, TrainingBatch{positives, negatives, k}, sink);
    opt.step(out.entity(focus), sink.row, options.learning_rate);
  }
  return out;
}

}  // namespace kgxb
