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

// C interface to kgxbench. All objects are opaque handles released with the
// matching *_free function. Functions return a kgxb_status; on failure the
// message is available from kgxb_last_error() on the calling thread until
// the next call that fails. Strings returned through char** out-parameters
// are owned by the caller and released with kgxb_string_free().

#ifndef KGXBENCH_KGXBENCH_H_
#define KGXBENCH_KGXBENCH_H_

#include <stddef.h>
#include <stdint.h>

#if defined(KGXBENCH_BUILDING_LIBRARY)
#define KGXB_API __attribute__((visibility("default")))
#else
#define KGXB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kgxb_status {
  KGXB_OK = 0,
  KGXB_ERR_ARGUMENT = 1,
  KGXB_ERR_PARSE = 2,
  KGXB_ERR_VALIDATION = 3,
  KGXB_ERR_REFERENCE = 4,
  KGXB_ERR_RANGE = 5,
  KGXB_ERR_IO = 6,
  KGXB_ERR_CONFIG = 7,
  KGXB_ERR_TRANSPORT = 8,
  KGXB_ERR_EXPLANATION = 9,
  KGXB_ERR_INTERNAL = 10,
} kgxb_status;

typedef enum kgxb_split {
  KGXB_SPLIT_TRAIN = 0,
  KGXB_SPLIT_VALIDATION = 1,
  KGXB_SPLIT_TEST = 2,
} kgxb_split;

typedef struct kgxb_kg kgxb_kg;
typedef struct kgxb_model kgxb_model;
typedef struct kgxb_run_config kgxb_run_config;
typedef struct kgxb_run_result kgxb_run_result;

KGXB_API const char* kgxb_version(void);
KGXB_API const char* kgxb_status_name(kgxb_status status);
KGXB_API const char* kgxb_last_error(void);
KGXB_API void kgxb_string_free(char* s);

// ---- Knowledge graphs ----

// Loads tab-separated triple files.
KGXB_API kgxb_status kgxb_kg_load(const char* train_path, const char* valid_path,
                                  const char* test_path, const char* name, kgxb_kg** out);
KGXB_API void kgxb_kg_free(kgxb_kg* kg);
KGXB_API size_t kgxb_kg_num_entities(const kgxb_kg* kg);
KGXB_API size_t kgxb_kg_num_relations(const kgxb_kg* kg);
KGXB_API size_t kgxb_kg_num_triples(const kgxb_kg* kg, kgxb_split split);

// ---- Embedding models ----

// kind is "TransE" or "ComplEx"; hyperparams_json may be NULL or a JSON
// object with any of dimension, epochs, learning_rate, batch_size,
// negatives_per_positive, margin, regularization, seed.
KGXB_API kgxb_status kgxb_model_train(const kgxb_kg* kg, const char* kind,
                                      const char* hyperparams_json, kgxb_model** out);
KGXB_API kgxb_status kgxb_model_load(const char* path, kgxb_model** out);
KGXB_API kgxb_status kgxb_model_save(const kgxb_model* model, const char* path);
KGXB_API void kgxb_model_free(kgxb_model* model);

// Triples are given by label.
KGXB_API kgxb_status kgxb_model_score(const kgxb_model* model, const kgxb_kg* kg,
                                      const char* subject, const char* predicate,
                                      const char* object, double* out);
KGXB_API kgxb_status kgxb_model_rank(const kgxb_model* model, const kgxb_kg* kg,
                                     const char* subject, const char* predicate,
                                     const char* object, double* out);
KGXB_API kgxb_status kgxb_model_lp(const kgxb_model* model, const kgxb_kg* kg,
                                   const char* subject, const char* predicate,
                                   char** out_object);

// ---- Evaluation ----

KGXB_API kgxb_status kgxb_fsv_of(int correct_without, int correct_with, int* out);

// Metrics over FSV labels in {-1, 0, 1} as a JSON document. With gold ==
// NULL the result holds average_fsv and fsv_distribution; otherwise a
// classification report of predicted against gold.
KGXB_API kgxb_status kgxb_metrics_json(const int* predicted, const int* gold, size_t n,
                                       double beta, char** out_json);

// ---- Experiments ----

KGXB_API kgxb_status kgxb_run_config_new(kgxb_run_config** out);
KGXB_API void kgxb_run_config_free(kgxb_run_config* config);

// Keys: workdir, data_dir, max_parallel, seed_override, tune_budget, epochs,
// select_threshold, select_max, beta, verifier (mock|remote), verifier_url,
// verifier_model, api_key_env, timeout_ms, mock_script, mock_policy,
// retry_attempts, retry_backoff_ms, explain_threads, verifier_in_flight,
// target, verbose (0|1).
KGXB_API kgxb_status kgxb_run_config_set(kgxb_run_config* config, const char* key,
                                         const char* value);

// Answers one prompt into `answer` (NUL-terminated, at most `capacity`
// bytes including the terminator). A non-zero return is a transport failure
// and is retried. May be called from several threads at once.
typedef int (*kgxb_verifier_fn)(void* user_data, const char* prompt, char* answer,
                                size_t capacity);

// Routes all verifier traffic to `fn`. `identity` names the callback in
// cache keys so results of different callbacks are never mixed.
KGXB_API kgxb_status kgxb_run_config_set_verifier(kgxb_run_config* config, kgxb_verifier_fn fn,
                                                  void* user_data, const char* identity);

// mode is "validation" or "comparison". Writes the task graph as JSON
// ({"nodes": [...], "edges": [[from, to], ...]}).
KGXB_API kgxb_status kgxb_dag_json(const char* setup_path, const char* mode,
                                   const kgxb_run_config* config, char** out_json);

// Parses the setup, runs it, writes metrics.json and run_report.jsonl. Task
// failures do not make this call fail; see kgxb_run_result_exit_code.
KGXB_API kgxb_status kgxb_run(const char* setup_path, const char* mode,
                              const kgxb_run_config* config, kgxb_run_result** out);
KGXB_API void kgxb_run_result_free(kgxb_run_result* result);

// 0 when every task succeeded, 1 otherwise.
KGXB_API int kgxb_run_result_exit_code(const kgxb_run_result* result);
// Borrowed strings, valid until the result is freed.
KGXB_API const char* kgxb_run_result_summary(const kgxb_run_result* result);
KGXB_API const char* kgxb_run_result_metrics_json(const kgxb_run_result* result);
KGXB_API const char* kgxb_run_result_report_jsonl(const kgxb_run_result* result);
// Number of tasks of `kind` ("TRAIN", ... or NULL for any) with `status`
// ("executed", "cache-hit", "skipped-failed", "failed").
KGXB_API size_t kgxb_run_result_count(const kgxb_run_result* result, const char* kind,
                                      const char* status);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // KGXBENCH_KGXBENCH_H_
