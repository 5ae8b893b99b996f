#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "compass/error.hpp"
#include "compass/registry.hpp"

namespace compass {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct CliInvocation {
  std::string subcommand;  // scrape | evaluate | analyze | report | serve | mock-run
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path registry;
  std::vector<std::string> models;
  std::vector<ModelSpec> model_specs;  // built-ins overlaid with the config file
  RunParameters params;                // defaults < config < flags
  std::filesystem::path out = "runs";
  std::optional<std::string> run_id;
  std::optional<std::filesystem::path> fixtures;
  std::optional<std::filesystem::path> report_dir;
  int parallel = 4;
  bool dry_run = false;
  std::uint64_t seed = 0;
  int retry_budget = 3;
  int malformed_retries = 0;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin;
  std::string service_run = "live";
  double centre_band = 2.0;

  bool help = false;
  std::string help_text;
};

/// Parses arguments (without the program name). Throws UsageError for unknown
/// flags or parameter combinations that break the run-parameter invariants,
/// ConfigError when the config file is unreadable or invalid.
CliInvocation parse_flags(const std::vector<std::string>& args);

/// Runs a command and returns the process exit code: 0 success, 1 usage,
/// 2 config, 3 storage, 4 incomplete run. Events go to `err` as JSON lines.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace compass
