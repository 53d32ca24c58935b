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

#include "kgxbench/kgxbench.h"

#include <charconv>
#include <cstring>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/checkpoint.hpp"
#include "core/error.hpp"
#include "core/fsv.hpp"
#include "core/kg.hpp"
#include "core/kge.hpp"
#include "core/metrics.hpp"
#include "workflow/pipeline.hpp"
#include "workflow/setup.hpp"

struct kgxb_kg {
  kgxb::KnowledgeGraph kg;
};

struct kgxb_model {
  kgxb::KgeModel model;
};

struct kgxb_run_config {
  kgxb::EngineOptions engine;
  nlohmann::json mock = nlohmann::json::object();
  nlohmann::json remote = nlohmann::json::object();
  bool verbose = false;
};

struct kgxb_run_result {
  int exit_code = 0;
  std::string summary;
  std::string metrics;
  std::string report;
  kgxb::RunReport run_report;
};

namespace {

thread_local std::string g_last_error;

kgxb_status fail(kgxb_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `fn`, mapping exceptions to status codes.
template <class Fn>
kgxb_status guarded(Fn&& fn) {
  try {
    fn();
    return KGXB_OK;
  } catch (const kgxb::Error& e) {
    return fail(static_cast<kgxb_status>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(KGXB_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(KGXB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(KGXB_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw kgxb::ArgumentError(std::string(what) + " must not be NULL");
}

kgxb::Triple labels_to_triple(const kgxb::KnowledgeGraph& kg, const char* s, const char* p,
                              const char* o) {
  require(s, "subject");
  require(p, "predicate");
  require(o, "object");
  const auto se = kg.find_entity(s);
  const auto pr = kg.find_relation(p);
  const auto oe = kg.find_entity(o);
  if (!se) throw kgxb::ReferenceError(std::string("unknown entity '") + s + "'");
  if (!pr) throw kgxb::ReferenceError(std::string("unknown relation '") + p + "'");
  if (!oe) throw kgxb::ReferenceError(std::string("unknown entity '") + o + "'");
  return {*se, *pr, *oe};
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  if constexpr (std::is_floating_point_v<T>) {
    std::size_t used = 0;
    try {
      out = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) {
      throw kgxb::ConfigError(key + " expects a number, got '" + value + "'");
    }
  } else {
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw kgxb::ConfigError(key + " expects an integer, got '" + value + "'");
    }
  }
  return out;
}

kgxb::Mode parse_mode(const char* mode) {
  require(mode, "mode");
  const std::string m = mode;
  if (m == "validation") return kgxb::Mode::kValidation;
  if (m == "comparison") return kgxb::Mode::kComparison;
  throw kgxb::ArgumentError("mode must be 'validation' or 'comparison', got '" + m + "'");
}

class CallbackVerifier : public kgxb::Verifier {
 public:
  CallbackVerifier(kgxb_verifier_fn fn, void* user_data) : fn_(fn), user_data_(user_data) {}

  std::vector<std::string> simulate(std::span<const std::string> prompts) override {
    std::vector<std::string> out;
    std::vector<char> buf(kCapacity);
    for (const std::string& p : prompts) {
      buf[0] = '\0';
      if (fn_(user_data_, p.c_str(), buf.data(), buf.size()) != 0) {
        throw kgxb::TransportError("verifier callback reported a failure");
      }
      buf.back() = '\0';
      out.emplace_back(buf.data());
    }
    return out;
  }

 private:
  static constexpr std::size_t kCapacity = 1 << 16;
  kgxb_verifier_fn fn_;
  void* user_data_;
};

kgxb::EngineOptions engine_options(const kgxb_run_config* config) {
  kgxb::EngineOptions o = config ? config->engine : kgxb::EngineOptions{};
  if (config && !o.verifier_instance) {
    o.verifier_options = o.verifier == "remote" ? config->remote : config->mock;
  }
  if (config && config->verbose) {
    o.log = [](const std::string& line) { std::cerr << "[kgxbench] " << line << "\n"; };
  }
  return o;
}

}  // namespace

extern "C" {

const char* kgxb_version(void) { return "0.1.0"; }

const char* kgxb_status_name(kgxb_status status) {
  switch (status) {
    case KGXB_OK: return "ok";
    case KGXB_ERR_ARGUMENT: return "argument error";
    case KGXB_ERR_PARSE: return "parse error";
    case KGXB_ERR_VALIDATION: return "validation error";
    case KGXB_ERR_REFERENCE: return "reference error";
    case KGXB_ERR_RANGE: return "range error";
    case KGXB_ERR_IO: return "I/O error";
    case KGXB_ERR_CONFIG: return "configuration error";
    case KGXB_ERR_TRANSPORT: return "transport error";
    case KGXB_ERR_EXPLANATION: return "explanation failure";
    case KGXB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* kgxb_last_error(void) { return g_last_error.c_str(); }

void kgxb_string_free(char* s) { std::free(s); }

kgxb_status kgxb_kg_load(const char* train_path, const char* valid_path, const char* test_path,
                         const char* name, kgxb_kg** out) {
  return guarded([&] {
    require(train_path, "train_path");
    require(valid_path, "valid_path");
    require(test_path, "test_path");
    require(out, "out");
    *out = new kgxb_kg{kgxb::load_kg(train_path, valid_path, test_path, name ? name : "")};
  });
}

void kgxb_kg_free(kgxb_kg* kg) { delete kg; }

size_t kgxb_kg_num_entities(const kgxb_kg* kg) { return kg ? kg->kg.num_entities() : 0; }

size_t kgxb_kg_num_relations(const kgxb_kg* kg) { return kg ? kg->kg.num_relations() : 0; }

size_t kgxb_kg_num_triples(const kgxb_kg* kg, kgxb_split split) {
  if (kg == nullptr) return 0;
  switch (split) {
    case KGXB_SPLIT_TRAIN: return kg->kg.train().size();
    case KGXB_SPLIT_VALIDATION: return kg->kg.validation().size();
    case KGXB_SPLIT_TEST: return kg->kg.test().size();
  }
  return 0;
}

kgxb_status kgxb_model_train(const kgxb_kg* kg, const char* kind, const char* hyperparams_json,
                             kgxb_model** out) {
  return guarded([&] {
    require(kg, "kg");
    require(kind, "kind");
    require(out, "out");
    kgxb::HyperParams hp;
    if (hyperparams_json != nullptr && *hyperparams_json != '\0') {
      hp = kgxb::hyperparams_from_json(nlohmann::json::parse(hyperparams_json));
    }
    *out = new kgxb_model{kgxb::train(kg->kg, kgxb::parse_model_kind(kind), hp)};
  });
}

kgxb_status kgxb_model_load(const char* path, kgxb_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new kgxb_model{kgxb::load_model(path)};
  });
}

kgxb_status kgxb_model_save(const kgxb_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    kgxb::save_model(model->model, path);
  });
}

void kgxb_model_free(kgxb_model* model) { delete model; }

kgxb_status kgxb_model_score(const kgxb_model* model, const kgxb_kg* kg, const char* subject,
                             const char* predicate, const char* object, double* out) {
  return guarded([&] {
    require(model, "model");
    require(kg, "kg");
    require(out, "out");
    const kgxb::Triple t = labels_to_triple(kg->kg, subject, predicate, object);
    *out = kgxb::score(model->model, t.subject, t.predicate, t.object);
  });
}

kgxb_status kgxb_model_rank(const kgxb_model* model, const kgxb_kg* kg, const char* subject,
                            const char* predicate, const char* object, double* out) {
  return guarded([&] {
    require(model, "model");
    require(kg, "kg");
    require(out, "out");
    const kgxb::Triple t = labels_to_triple(kg->kg, subject, predicate, object);
    if (model->model.num_entities() != kg->kg.num_entities() ||
        model->model.num_relations() != kg->kg.num_relations()) {
      throw kgxb::ValidationError("model and graph sizes differ");
    }
    *out = kgxb::rank(model->model, kg->kg, t).rank;
  });
}

kgxb_status kgxb_model_lp(const kgxb_model* model, const kgxb_kg* kg, const char* subject,
                          const char* predicate, char** out_object) {
  return guarded([&] {
    require(model, "model");
    require(kg, "kg");
    require(subject, "subject");
    require(predicate, "predicate");
    require(out_object, "out_object");
    const auto s = kg->kg.find_entity(subject);
    const auto p = kg->kg.find_relation(predicate);
    if (!s) throw kgxb::ReferenceError(std::string("unknown entity '") + subject + "'");
    if (!p) throw kgxb::ReferenceError(std::string("unknown relation '") + predicate + "'");
    if (model->model.num_entities() != kg->kg.num_entities() ||
        model->model.num_relations() != kg->kg.num_relations()) {
      throw kgxb::ValidationError("model and graph sizes differ");
    }
    *out_object = dup_string(kg->kg.entity_label(kgxb::lp(model->model, kg->kg, {*s, *p})));
  });
}

kgxb_status kgxb_fsv_of(int correct_without, int correct_with, int* out) {
  return guarded([&] {
    require(out, "out");
    *out = kgxb::fsv_of(correct_without, correct_with);
  });
}

kgxb_status kgxb_metrics_json(const int* predicted, const int* gold, size_t n, double beta,
                              char** out_json) {
  return guarded([&] {
    require(predicted, "predicted");
    require(out_json, "out_json");
    const kgxb::FsvVector p(std::vector<int>(predicted, predicted + n));
    nlohmann::json j;
    if (gold == nullptr) {
      j = kgxb::to_json(kgxb::summarize_fsv(p));
    } else {
      const kgxb::FsvVector g(std::vector<int>(gold, gold + n));
      j = kgxb::to_json(kgxb::classification_report(p, g, beta));
    }
    *out_json = dup_string(j.dump());
  });
}

kgxb_status kgxb_run_config_new(kgxb_run_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new kgxb_run_config();
  });
}

void kgxb_run_config_free(kgxb_run_config* config) { delete config; }

kgxb_status kgxb_run_config_set(kgxb_run_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    const std::string k = key;
    const std::string v = value;
    kgxb::EngineOptions& e = config->engine;
    if (k == "workdir") {
      e.workdir = v;
    } else if (k == "data_dir") {
      e.data_dir = v;
    } else if (k == "max_parallel") {
      e.max_parallel = parse_number<int>(k, v);
      if (e.max_parallel < 1) throw kgxb::ConfigError("max_parallel must be at least 1");
    } else if (k == "seed_override") {
      if (v.empty()) {
        e.seed_override.reset();
      } else {
        e.seed_override = parse_number<std::uint64_t>(k, v);
      }
    } else if (k == "tune_budget") {
      e.tune_budget = parse_number<int>(k, v);
      if (e.tune_budget < 1) throw kgxb::ConfigError("tune_budget must be at least 1");
    } else if (k == "epochs") {
      if (v.empty()) {
        e.epochs.reset();
      } else {
        e.epochs = parse_number<int>(k, v);
        if (*e.epochs < 0) throw kgxb::ConfigError("epochs must be non-negative");
      }
    } else if (k == "select_threshold") {
      e.select_threshold = parse_number<double>(k, v);
    } else if (k == "select_max") {
      e.select_max = parse_number<int>(k, v);
    } else if (k == "beta") {
      e.beta = parse_number<double>(k, v);
    } else if (k == "verifier") {
      if (v != "mock" && v != "remote") {
        throw kgxb::ConfigError("verifier must be 'mock' or 'remote', got '" + v + "'");
      }
      e.verifier = v;
      e.verifier_instance.reset();
    } else if (k == "verifier_url") {
      config->remote["url"] = v;
    } else if (k == "verifier_model") {
      config->remote["model"] = v;
    } else if (k == "api_key_env") {
      config->remote["api_key_env"] = v;
    } else if (k == "timeout_ms") {
      config->remote["timeout_ms"] = parse_number<long long>(k, v);
    } else if (k == "mock_script") {
      if (v.empty()) {
        config->mock.erase("script");
      } else {
        config->mock["script"] = std::filesystem::absolute(v).string();
      }
    } else if (k == "mock_policy") {
      config->mock["policy"] = v;
    } else if (k == "retry_attempts") {
      e.retry.attempts = parse_number<int>(k, v);
    } else if (k == "retry_backoff_ms") {
      e.retry.initial_backoff = std::chrono::milliseconds(parse_number<long long>(k, v));
    } else if (k == "explain_threads") {
      e.explain_threads = parse_number<int>(k, v);
    } else if (k == "verifier_in_flight") {
      e.verifier_in_flight = parse_number<int>(k, v);
    } else if (k == "target") {
      if (v.empty()) {
        e.target.reset();
      } else {
        e.target = v;
      }
    } else if (k == "verbose") {
      config->verbose = v == "1" || v == "true";
    } else {
      throw kgxb::ConfigError("unknown run option '" + k + "'");
    }
  });
}

kgxb_status kgxb_run_config_set_verifier(kgxb_run_config* config, kgxb_verifier_fn fn,
                                         void* user_data, const char* identity) {
  return guarded([&] {
    require(config, "config");
    if (fn == nullptr) throw kgxb::ArgumentError("fn must not be NULL");
    require(identity, "identity");
    if (*identity == '\0') throw kgxb::ArgumentError("identity must not be empty");
    config->engine.verifier_instance = std::make_shared<CallbackVerifier>(fn, user_data);
    config->engine.verifier_identity = identity;
  });
}

kgxb_status kgxb_dag_json(const char* setup_path, const char* mode,
                          const kgxb_run_config* config, char** out_json) {
  return guarded([&] {
    require(setup_path, "setup_path");
    require(out_json, "out_json");
    const kgxb::Mode m = parse_mode(mode);
    const auto rows = kgxb::parse_setup(setup_path, m);
    const kgxb::Dag dag = kgxb::build_dag(rows, m, engine_options(config));
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : dag.nodes()) {
      nodes.push_back({{"kind", kgxb::task_kind_name(n.kind)},
                       {"output", n.output_name},
                       {"params", n.params}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [from, to] : dag.edges()) edges.push_back({from, to});
    *out_json = dup_string(nlohmann::json{{"nodes", nodes}, {"edges", edges}}.dump(2));
  });
}

kgxb_status kgxb_run(const char* setup_path, const char* mode, const kgxb_run_config* config,
                     kgxb_run_result** out) {
  return guarded([&] {
    require(setup_path, "setup_path");
    require(out, "out");
    const kgxb::Mode m = parse_mode(mode);
    const auto rows = kgxb::parse_setup(setup_path, m);
    const kgxb::RunResult r = kgxb::run_experiment(rows, m, engine_options(config));
    auto result = std::make_unique<kgxb_run_result>();
    result->exit_code = r.exit_code;
    result->summary = kgxb::format_summary(r, m);
    result->metrics = r.metrics.dump(2) + "\n";
    result->report = r.report.to_jsonl();
    result->run_report = r.report;
    *out = result.release();
  });
}

void kgxb_run_result_free(kgxb_run_result* result) { delete result; }

int kgxb_run_result_exit_code(const kgxb_run_result* result) {
  return result ? result->exit_code : 1;
}

const char* kgxb_run_result_summary(const kgxb_run_result* result) {
  return result ? result->summary.c_str() : "";
}

const char* kgxb_run_result_metrics_json(const kgxb_run_result* result) {
  return result ? result->metrics.c_str() : "";
}

const char* kgxb_run_result_report_jsonl(const kgxb_run_result* result) {
  return result ? result->report.c_str() : "";
}

size_t kgxb_run_result_count(const kgxb_run_result* result, const char* kind,
                             const char* status) {
  if (result == nullptr || status == nullptr) return 0;
  size_t n = 0;
  for (const auto& r : result->run_report.records) {
    if (kind != nullptr && kgxb::task_kind_name(r.kind) != kind) continue;
    if (kgxb::task_status_name(r.status) == status) ++n;
  }
  return n;
}

}  // extern "C"
