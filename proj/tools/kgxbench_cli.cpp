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

// kgxbench command-line driver.
//
//   kgxbench validation [setup.csv] [flags]
//   kgxbench comparison [setup.csv] [flags]
//   kgxbench dag validation|comparison [setup.csv] [flags]
//
// Exit status: 0 success, 1 a task failed, 2 usage or setup error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kgxbench/kgxbench.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTaskFailure = 1;
constexpr int kExitUsage = 2;

struct Flags {
  std::string setup;
  std::string workdir = ".";
  std::string data_dir;
  int max_parallel = 1;
  std::optional<unsigned long long> seed_override;
  std::string verifier = "mock";
  std::string verifier_url;
  std::string verifier_model;
  std::string mock_script;
  std::string mock_policy;
  std::optional<int> tune_budget;
  std::optional<int> epochs;
  std::optional<int> explain_threads;
  std::string target;
  bool quiet = false;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("setup", f.setup, "Setup CSV (default: <mode>.csv)");
  cmd->add_option("--workdir", f.workdir, "Directory for artifacts and metrics.json");
  cmd->add_option("--data-dir", f.data_dir,
                  "Directory holding <kg_name>/{train,valid,test}.txt (default: <workdir>/data)");
  cmd->add_option("--max-parallel", f.max_parallel, "Tasks run concurrently")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed-override", f.seed_override, "Replace every configured seed");
  cmd->add_option("--verifier", f.verifier, "Verifier backend")
      ->check(CLI::IsMember({"mock", "remote"}));
  cmd->add_option("--verifier-url", f.verifier_url, "Chat-completion endpoint (remote)");
  cmd->add_option("--verifier-model", f.verifier_model, "Model name sent to the endpoint");
  cmd->add_option("--mock-script", f.mock_script, "JSON-lines answers for the mock verifier")
      ->check(CLI::ExistingFile);
  cmd->add_option("--mock-policy", f.mock_policy,
                  "Mock answer for unscripted prompts: silent | explanation_object")
      ->check(CLI::IsMember({"silent", "explanation_object"}));
  cmd->add_option("--tune-budget", f.tune_budget, "Hyperparameter configurations tried")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--epochs", f.epochs, "Training epochs, replacing the tuned value")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--explain-threads", f.explain_threads, "Threads per explanation task")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--target", f.target, "Build only this artifact and its prerequisites");
  cmd->add_flag("-q,--quiet", f.quiet, "Only print the summary");
}

bool set(kgxb_run_config* cfg, const char* key, const std::string& value) {
  if (kgxb_run_config_set(cfg, key, value.c_str()) != KGXB_OK) {
    std::cerr << "kgxbench: " << kgxb_last_error() << "\n";
    return false;
  }
  return true;
}

bool configure(kgxb_run_config* cfg, const Flags& f) {
  const std::string data_dir =
      f.data_dir.empty() ? (std::filesystem::path(f.workdir) / "data").string() : f.data_dir;
  bool ok = set(cfg, "workdir", f.workdir) && set(cfg, "data_dir", data_dir) &&
            set(cfg, "max_parallel", std::to_string(f.max_parallel)) &&
            set(cfg, "verifier", f.verifier) && set(cfg, "verbose", f.quiet ? "0" : "1");
  if (ok && f.seed_override) ok = set(cfg, "seed_override", std::to_string(*f.seed_override));
  if (ok && !f.verifier_url.empty()) ok = set(cfg, "verifier_url", f.verifier_url);
  if (ok && !f.verifier_model.empty()) ok = set(cfg, "verifier_model", f.verifier_model);
  if (ok && !f.mock_script.empty()) ok = set(cfg, "mock_script", f.mock_script);
  if (ok && !f.mock_policy.empty()) ok = set(cfg, "mock_policy", f.mock_policy);
  if (ok && f.tune_budget) ok = set(cfg, "tune_budget", std::to_string(*f.tune_budget));
  if (ok && f.epochs) ok = set(cfg, "epochs", std::to_string(*f.epochs));
  if (ok && f.explain_threads) {
    ok = set(cfg, "explain_threads", std::to_string(*f.explain_threads));
  }
  if (ok && !f.target.empty()) ok = set(cfg, "target", f.target);
  if (ok && f.verifier == "remote" && f.verifier_url.empty()) {
    std::cerr << "kgxbench: --verifier remote needs --verifier-url\n";
    ok = false;
  }
  return ok;
}

std::string setup_path(const Flags& f, const std::string& mode) {
  return f.setup.empty() ? mode + ".csv" : f.setup;
}

int run(const std::string& mode, const Flags& f, const CLI::App& cmd) {
  const std::string path = setup_path(f, mode);
  if (!std::filesystem::is_regular_file(path)) {
    std::cerr << "kgxbench: setup file '" << path << "' not found\n\n" << cmd.help();
    return kExitUsage;
  }
  kgxb_run_config* cfg = nullptr;
  if (kgxb_run_config_new(&cfg) != KGXB_OK) return kExitUsage;
  if (!configure(cfg, f)) {
    kgxb_run_config_free(cfg);
    return kExitUsage;
  }
  kgxb_run_result* result = nullptr;
  const kgxb_status status = kgxb_run(path.c_str(), mode.c_str(), cfg, &result);
  kgxb_run_config_free(cfg);
  if (status != KGXB_OK) {
    std::cerr << "kgxbench: " << kgxb_status_name(status) << ": " << kgxb_last_error() << "\n";
    return status == KGXB_ERR_INTERNAL ? kExitTaskFailure : kExitUsage;
  }
  std::cout << kgxb_run_result_summary(result);
  std::cout << "tasks: " << kgxb_run_result_count(result, nullptr, "executed") << " executed, "
            << kgxb_run_result_count(result, nullptr, "cache-hit") << " cached, "
            << kgxb_run_result_count(result, nullptr, "failed") << " failed, "
            << kgxb_run_result_count(result, nullptr, "skipped-failed") << " skipped\n";
  const int code = kgxb_run_result_exit_code(result) == 0 ? kExitOk : kExitTaskFailure;
  kgxb_run_result_free(result);
  return code;
}

int print_dag(const std::string& mode, const Flags& f) {
  const std::string path = setup_path(f, mode);
  kgxb_run_config* cfg = nullptr;
  if (kgxb_run_config_new(&cfg) != KGXB_OK) return kExitUsage;
  if (!configure(cfg, f)) {
    kgxb_run_config_free(cfg);
    return kExitUsage;
  }
  char* json = nullptr;
  const kgxb_status status = kgxb_dag_json(path.c_str(), mode.c_str(), cfg, &json);
  kgxb_run_config_free(cfg);
  if (status != KGXB_OK) {
    std::cerr << "kgxbench: " << kgxb_status_name(status) << ": " << kgxb_last_error() << "\n";
    return kExitUsage;
  }
  std::cout << json << "\n";
  kgxb_string_free(json);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark link-prediction explanation methods", "kgxbench"};
  app.set_version_flag("--version", kgxb_version());
  app.require_subcommand(1);

  Flags validation_flags;
  Flags comparison_flags;
  Flags dag_flags;
  std::string dag_mode;
  CLI::App* validation =
      app.add_subcommand("validation", "Check the protocol against ground-truth explanations");
  add_run_flags(validation, validation_flags);
  CLI::App* comparison =
      app.add_subcommand("comparison", "Compare explanation methods on trained models");
  add_run_flags(comparison, comparison_flags);
  CLI::App* dag = app.add_subcommand("dag", "Print the task graph of a setup as JSON");
  dag->add_option("mode", dag_mode, "validation | comparison")
      ->required()
      ->check(CLI::IsMember({"validation", "comparison"}));
  add_run_flags(dag, dag_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (validation->parsed()) return run("validation", validation_flags, *validation);
  if (comparison->parsed()) return run("comparison", comparison_flags, *comparison);
  return print_dag(dag_mode, dag_flags);
}
