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

#include "workflow/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>

#include "core/checkpoint.hpp"
#include "core/error.hpp"
#include "core/ground_truth.hpp"
#include "core/metrics.hpp"
#include "core/registry.hpp"

namespace kgxb {
namespace {

using json = nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << bytes;
  if (!out.flush()) throw IoError("write failed on " + path.string());
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(n, path.filename().string() + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& path,
                                               std::size_t columns) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      cells.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cells.size() != columns) {
      throw ParseError(n, path.filename().string() + ": expected " + std::to_string(columns) +
                              " columns");
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

json triple_json(const KnowledgeGraph& kg, const Triple& t) {
  return json::array(
      {kg.entity_label(t.subject), kg.relation_label(t.predicate), kg.entity_label(t.object)});
}

Triple triple_from_labels(const KnowledgeGraph& kg, const std::string& s, const std::string& p,
                          const std::string& o) {
  const auto se = kg.find_entity(s);
  const auto pr = kg.find_relation(p);
  const auto oe = kg.find_entity(o);
  if (!se || !pr || !oe) {
    throw ReferenceError("(" + s + ", " + p + ", " + o + ") references unknown labels");
  }
  return Triple{*se, *pr, *oe};
}

Triple triple_from_json(const KnowledgeGraph& kg, const json& j) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("triple must be a 3-element array");
  return triple_from_labels(kg, j[0].get<std::string>(), j[1].get<std::string>(),
                            j[2].get<std::string>());
}

std::string triple_tsv(const KnowledgeGraph& kg, const Triple& t) {
  return kg.entity_label(t.subject) + "\t" + kg.relation_label(t.predicate) + "\t" +
         kg.entity_label(t.object);
}

// Loaded graphs are shared between tasks of one run; they are immutable.
class KgCache {
 public:
  std::shared_ptr<const KnowledgeGraph> get(const TaskSpec& spec) {
    const json& files = spec.params.at("files");
    const std::string key = files.dump();
    std::lock_guard lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto kg = std::make_shared<const KnowledgeGraph>(
        load_kg(files.at("train").get<std::string>(), files.at("valid").get<std::string>(),
                files.at("test").get<std::string>(), spec.params.at("kg").get<std::string>()));
    cache_.emplace(key, kg);
    return kg;
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const KnowledgeGraph>> cache_;
};

std::string stem(const TaskSpec& spec) {
  return spec.params.at("kg").get<std::string>() + "_" + spec.params.at("kge").get<std::string>();
}

std::string model_artifact(const TaskSpec& spec) { return "kge." + stem(spec); }

std::string lpx_rendering(const TaskSpec& spec) {
  const json& lpx = spec.params.at("lpx");
  return lpx.is_string() ? lpx.get<std::string>() : render_config(lpx_config_from_json(lpx));
}

class TaskRunner {
 public:
  explicit TaskRunner(const EngineOptions& options) : options_(options) {}

  void operator()(const TaskContext& ctx) {
    switch (ctx.spec().kind) {
      case TaskKind::kTune: return run_tune(ctx);
      case TaskKind::kTrain: return run_train(ctx);
      case TaskKind::kRank: return run_rank(ctx);
      case TaskKind::kSelect: return run_select(ctx);
      case TaskKind::kExplain: return run_explain(ctx);
      case TaskKind::kEvaluate: return run_evaluate(ctx);
      case TaskKind::kMetrics: return run_metrics(ctx);
    }
  }

 private:
  void log(const std::string& line) const {
    if (options_.log) options_.log(line);
  }

  static ModelKind kind_of(const TaskSpec& spec) {
    return parse_model_kind(spec.params.at("kge").get<std::string>());
  }

  void run_tune(const TaskContext& ctx) {
    const TaskSpec& spec = ctx.spec();
    auto kg = kgs_.get(spec);
    HyperParams base;
    if (spec.params.contains("epochs")) base.epochs = spec.params["epochs"].get<int>();
    const TuneResult result = tune(*kg, kind_of(spec), spec.params.at("budget").get<int>(),
                                   spec.params.at("seed").get<std::uint64_t>(), base);
    json trials = json::array();
    double best_mrr = 0.0;
    for (const auto& t : result.trials) {
      trials.push_back({{"hyperparams", hyperparams_to_json(t.hp)}, {"mrr", t.validation_mrr}});
      if (t.hp == result.best) best_mrr = t.validation_mrr;
    }
    const json out{{"kge", spec.params.at("kge")},
                   {"hyperparams", hyperparams_to_json(result.best)},
                   {"validation_mrr", best_mrr},
                   {"trials", trials}};
    write_file(ctx.output(), out.dump(2) + "\n");
    log(spec.output_name + ": best validation MRR " + std::to_string(best_mrr));
  }

  void run_train(const TaskContext& ctx) {
    const TaskSpec& spec = ctx.spec();
    auto kg = kgs_.get(spec);
    HyperParams hp = read_hp_config(ctx.input("hp_config." + stem(spec)));
    if (spec.params.contains("epochs")) hp.epochs = spec.params["epochs"].get<int>();
    const KgeModel model = train(*kg, kind_of(spec), hp);
    save_model(model, ctx.output());
  }

  void run_rank(const TaskContext& ctx) {
    const TaskSpec& spec = ctx.spec();
    auto kg = kgs_.get(spec);
    const KgeModel model = load_model(ctx.input(model_artifact(spec)));
    std::string out;
    for (const Triple& t : kg->test()) {
      out += triple_tsv(*kg, t) + "\t" + json(rank(model, *kg, t).rank).dump() + "\n";
    }
    write_file(ctx.output(), out);
  }

  void run_select(const TaskContext& ctx) {
    const TaskSpec& spec = ctx.spec();
    const auto rows = read_tsv(ctx.input("ranked." + stem(spec)), 4);
    // Ranked rows are addressed by position; the triple ids are placeholders.
    std::vector<RankedTriple> ranked;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto id = static_cast<std::uint32_t>(i);
      ranked.push_back({Triple{EntityId{id}, RelationId{0}, EntityId{0}},
                        std::stod(rows[i][3])});
    }
    const auto chosen =
        select_predictions(ranked, spec.params.at("threshold").get<double>(),
                           static_cast<std::size_t>(spec.params.at("max").get<int>()));
    std::string out;
    for (const Triple& t : chosen) {
      const auto& r = rows[t.subject.value];
      out += r[0] + "\t" + r[1] + "\t" + r[2] + "\n";
    }
    write_file(ctx.output(), out);
  }

  void run_explain(const TaskContext& ctx) {
    const TaskSpec& spec = ctx.spec();
    auto kg = kgs_.get(spec);
    std::string out;
    if (spec.params.at("lpx").is_string()) {
      const GroundTruthDataset gt =
          load_ground_truth(kg, spec.params.at("ground_truth").get<std::string>());
      for (const auto& e : gt.entries) {
        json ex = json::array();
        for (const Triple& t : e.explanation) ex.push_back(triple_json(*kg, t));
        out += json{{"prediction", triple_json(*kg, e.prediction)},
                    {"explanation", ex},
                    {"label", e.quality}}
                   .dump() +
               "\n";
      }
      write_file(ctx.output(), out);
      return;
    }
    const LpxConfig config = lpx_config_from_json(spec.params.at("lpx"));
    const KgeModel model = load_model(ctx.input(model_artifact(spec)));
    std::vector<Triple> predictions;
    for (const auto& r : read_tsv(ctx.input("predictions." + stem(spec)), 3)) {
      predictions.push_back(triple_from_labels(*kg, r[0], r[1], r[2]));
    }
    const Explainer explainer = Registry::instance().explainer(config.method);
    const auto results =
        explainer.explain(predictions, *kg, model, config, options_.explain_threads);
    if (results.size() != predictions.size()) {
      throw Error(ErrorCode::kInternal, "explainer returned the wrong number of results");
    }
    for (const auto& r : results) {
      json ex = json::array();
      for (const Triple& t : r.explanation.triples) ex.push_back(triple_json(*kg, t));
      json rec{{"prediction", triple_json(*kg, r.prediction)}, {"explanation", ex}};
      rec["relevance"] = r.relevance ? json(*r.relevance) : json(nullptr);
      if (r.failed()) {
        rec["error"] = r.failure;
        log(spec.output_name + ": no explanation for " + kg->describe(r.prediction) + ": " +
            r.failure);
      }
      out += rec.dump() + "\n";
    }
    write_file(ctx.output(), out);
  }

  std::shared_ptr<Verifier> verifier() {
    std::lock_guard lock(mu_);
    if (!verifier_) {
      verifier_ = options_.verifier_instance
                      ? options_.verifier_instance
                      : Registry::instance().verifier(options_.verifier,
                                                      options_.verifier_options);
    }
    return verifier_;
  }

  void run_evaluate(const TaskContext& ctx) {
    const TaskSpec& spec = ctx.spec();
    auto kg = kgs_.get(spec);
    const KgeModel model = load_model(ctx.input(model_artifact(spec)));
    const EvalConfig config = eval_config_from_json(spec.params.at("eval"));
    std::vector<Triple> predictions;
    std::vector<Explanation> explanations;
    std::vector<std::optional<int>> labels;
    const std::string explanations_name = "explanations." + stem(spec) + "_" + lpx_rendering(spec);
    for (const json& rec : read_jsonl(ctx.input(explanations_name))) {
      predictions.push_back(triple_from_json(*kg, rec.at("prediction")));
      std::vector<Triple> ex;
      for (const json& t : rec.at("explanation")) ex.push_back(triple_from_json(*kg, t));
      explanations.push_back(Explanation::of(std::move(ex)));
      labels.push_back(rec.contains("label") ? std::optional<int>(rec["label"].get<int>())
                                             : std::nullopt);
    }
    EvaluateOptions eo;
    eo.retry = options_.retry;
    eo.max_in_flight = options_.verifier_in_flight;
    eo.log = [this, &spec](const std::string& m) { log(spec.output_name + ": " + m); };
    const json& lpx = spec.params.at("lpx");
    if (lpx.is_object()) {
      eo.verbalizer = Registry::instance().explainer(lpx.at("method").get<std::string>()).verbalizer;
    }
    auto v = verifier();
    const auto records = evaluate(predictions, explanations, *kg, model, *v, config, eo);
    std::string out;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      json j{{"prediction", triple_json(*kg, r.prediction)},
             {"lp_answer", kg->entity_label(r.lp_answer)},
             {"answer_without", r.raw_without},
             {"answer_with", r.raw_with},
             {"correct_without", r.correct_without},
             {"correct_with", r.correct_with},
             {"fsv", r.fsv}};
      if (r.failed_without || r.failed_with) {
        j["failed_without"] = r.failed_without;
        j["failed_with"] = r.failed_with;
      }
      if (labels[i]) j["label"] = *labels[i];
      out += j.dump() + "\n";
    }
    write_file(ctx.output(), out);
  }

  void run_metrics(const TaskContext& ctx) {
    const TaskSpec& spec = ctx.spec();
    const EvalConfig eval = eval_config_from_json(spec.params.at("eval"));
    const std::string lpx = lpx_rendering(spec);
    const std::string scores_name = "scores." + stem(spec) + "_" + lpx + "_" + render_config(eval);
    const auto records = read_scores(ctx.input(scores_name));
    std::vector<int> predicted;
    std::vector<int> gold;
    for (const auto& r : records) {
      predicted.push_back(r.fsv);
      if (r.label) gold.push_back(*r.label);
    }
    const FsvVector fsv(predicted);
    json out{{"kg", spec.params.at("kg")},
             {"kge", spec.params.at("kge")},
             {"lpx", lpx},
             {"eval", render_config(eval)},
             {"n", records.size()}};
    for (const json& m : spec.params.at("metric_names")) {
      const std::string name = m.get<std::string>();
      if (name == "classification_report") {
        if (gold.size() != predicted.size()) {
          throw ValidationError("classification_report needs a gold label for every item");
        }
        out[name] = to_json(
            classification_report(fsv, FsvVector(gold), spec.params.at("beta").get<double>()));
      } else if (name == "average_fsv") {
        out[name] = average_fsv(fsv);
      } else if (name == "fsv_distribution") {
        json dist = json::object();
        for (const auto& [label, p] : fsv_distribution(fsv)) dist[std::to_string(label)] = p;
        out[name] = dist;
      } else if (name == "fsv_summary") {
        out[name] = to_json(summarize_fsv(fsv));
      } else {
        throw ConfigError("unknown metric '" + name + "'");
      }
    }
    write_file(ctx.output(), out.dump(2) + "\n");
  }

  const EngineOptions& options_;
  KgCache kgs_;
  std::mutex mu_;
  std::shared_ptr<Verifier> verifier_;
};

}  // namespace

HyperParams read_hp_config(const std::filesystem::path& path) {
  const json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.contains("hyperparams")) {
    throw ValidationError(path.filename().string() + " is not a hyperparameter config");
  }
  return hyperparams_from_json(j["hyperparams"]);
}

std::vector<ScoreRecord> read_scores(const std::filesystem::path& path) {
  std::vector<ScoreRecord> out;
  for (const json& j : read_jsonl(path)) {
    ScoreRecord r;
    const json& t = j.at("prediction");
    r.subject = t.at(0).get<std::string>();
    r.predicate = t.at(1).get<std::string>();
    r.object = t.at(2).get<std::string>();
    r.lp_answer = j.at("lp_answer").get<std::string>();
    r.fsv = j.at("fsv").get<int>();
    if (j.contains("label")) r.label = j["label"].get<int>();
    out.push_back(std::move(r));
  }
  return out;
}

DagOptions dag_options(const EngineOptions& options) {
  DagOptions d;
  d.data_dir = options.data_dir;
  d.tune_budget = options.tune_budget;
  d.epochs = options.epochs;
  d.seed_override = options.seed_override;
  d.select_threshold = options.select_threshold;
  d.select_max = options.select_max;
  d.beta = options.beta;
  d.verifier_identity = verifier_identity(options);
  return d;
}

std::string verifier_identity(const EngineOptions& options) {
  if (options.verifier_instance) {
    if (options.verifier_identity.empty()) {
      throw ConfigError("an in-process verifier needs an identity");
    }
    return "custom:" + options.verifier_identity;
  }
  std::string id = options.verifier + ":" + options.verifier_options.dump();
  if (options.verifier_options.contains("script")) {
    id += ":" + sha256_file(options.verifier_options["script"].get<std::string>());
  }
  return id;
}

Dag build_dag(const std::vector<SetupRow>& rows, Mode mode, const EngineOptions& options) {
  Dag dag = instantiate_dag(rows, mode, dag_options(options));
  if (options.target) return dag.restricted_to(*options.target);
  return dag;
}

TaskBody make_task_body(const EngineOptions& options) {
  auto runner = std::make_shared<TaskRunner>(options);
  return [runner](const TaskContext& ctx) { (*runner)(ctx); };
}

RunResult run_experiment(const std::vector<SetupRow>& rows, Mode mode,
                         const EngineOptions& options) {
  const DagOptions dopts = dag_options(options);
  const Dag dag = build_dag(rows, mode, options);
  ArtifactStore store(options.workdir);
  ExecuteOptions eo;
  eo.max_parallel = options.max_parallel;
  if (options.log) {
    eo.on_finish = [&](const TaskRecord& r) {
      std::string line = std::string(task_status_name(r.status)) + " " + r.output_name;
      if (!r.error.empty()) line += ": " + r.error;
      options.log(line);
    };
  }
  RunResult result;
  result.report = execute(dag, store, make_task_body(options), eo);
  ArtifactStore::write_atomic(options.workdir / "run_report.jsonl", result.report.to_jsonl());

  for (const SetupRow& row : rows) {
    RowResult rr;
    rr.row = effective_row(row, dopts);
    rr.metrics_name = row_outputs(row, mode, dopts).metrics;
    if (const TaskRecord* rec = result.report.find(rr.metrics_name)) {
      rr.status = rec->status;
      if (rec->status == TaskStatus::kExecuted || rec->status == TaskStatus::kCacheHit) {
        rr.metrics = json::parse(read_file(store.path_of(rr.metrics_name)));
        result.metrics[rr.metrics_name] = *rr.metrics;
      }
    }
    result.rows.push_back(std::move(rr));
  }
  if (!options.target) {
    ArtifactStore::write_atomic(options.workdir / "metrics.json", result.metrics.dump(2) + "\n");
  }
  result.exit_code = result.report.ok() ? 0 : 1;
  return result;
}

std::string format_summary(const RunResult& result, Mode mode) {
  std::ostringstream out;
  auto fmt = [](double x) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << x;
    return s.str();
  };
  out << std::left << std::setw(5) << "row" << std::setw(14) << "kg" << std::setw(9) << "kge"
      << std::setw(34) << "lpx_config" << std::setw(40) << "eval_config" << std::setw(16)
      << "status" << "result\n";
  std::size_t i = 0;
  for (const RowResult& r : result.rows) {
    ++i;
    std::string lpx = r.row.lpx_config ? render_config(*r.row.lpx_config) : "ground_truth";
    std::string value = "-";
    if (r.metrics) {
      const json& m = *r.metrics;
      if (mode == Mode::kValidation && m.contains("classification_report")) {
        value = "accuracy=" + fmt(m["classification_report"]["accuracy"].get<double>());
      } else if (m.contains("average_fsv")) {
        value = "avg_fsv=" + fmt(m["average_fsv"].get<double>());
      } else if (m.contains("fsv_summary")) {
        value = "avg_fsv=" + fmt(m["fsv_summary"]["average_fsv"].get<double>());
      }
      value += " n=" + std::to_string(m.value("n", 0));
    }
    out << std::left << std::setw(5) << i << std::setw(14) << r.row.kg_name << std::setw(9)
        << r.row.kge_name << std::setw(34) << lpx << std::setw(40)
        << render_config(r.row.eval_config) << std::setw(16) << task_status_name(r.status)
        << value << "\n";
  }
  return out.str();
}

}  // namespace kgxb
