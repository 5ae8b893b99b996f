#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "compass/batch.hpp"
#include "compass/event_log.hpp"
#include "compass/fetch.hpp"
#include "compass/gateway.hpp"
#include "compass/registry.hpp"
#include "compass/store.hpp"

namespace compass {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitConfig = 2, kExitStorage = 3, kExitIncomplete = 4 };

struct PipelineConfig {
  std::filesystem::path registry_path;
  std::vector<ModelSpec> available_models;
  std::vector<std::string> model_ids;
  RunParameters params;
  std::filesystem::path runs_root = "runs";
  std::optional<std::string> run_id;
  int parallel = 4;
  bool dry_run = false;
  std::uint64_t seed = 0;
  BatchOptions batch;
};

/// Everything with side effects, injected so offline runs are reproducible.
struct PipelineEnv {
  Clock* clock = nullptr;
  Gateway* gateway = nullptr;
  std::function<std::shared_ptr<Fetcher>(int day)> fetcher_for_day;
  /// Called before day `d` starts; offline runs move a simulated clock here.
  std::function<void(int day)> on_day_start;
  EventLog* log = nullptr;
};

struct PipelineResult {
  std::string run_id;
  std::filesystem::path dir;
  RunManifest manifest;
  std::size_t evaluations = 0;
  std::size_t provider_calls = 0;
  int exit_code = kExitOk;
};

/// The daily loop: for each day and newspaper, scrape the homepage, keep the
/// S longest links, extract, length-filter, then collect a batch per model
/// and append. Newspapers that fail to scrape are logged and skipped.
/// Newspapers run on up to `parallel` workers; results are appended in
/// registry order so the store does not depend on scheduling.
///
/// Throws ConfigError before anything is written when the registry or models
/// do not load, and StorageError when the run directory cannot be written.
PipelineResult run_pipeline(const PipelineConfig& config, PipelineEnv& env);

/// Evaluates the articles already stored in a run (as written by a dry run),
/// one batch per stored (newspaper, day) pool and model.
PipelineResult evaluate_stored_run(const PipelineConfig& config, PipelineEnv& env, const std::string& run_id);

/// Default run id from a timestamp: "run-20240509T090000Z".
std::string default_run_id(Timestamp t);

}  // namespace compass
